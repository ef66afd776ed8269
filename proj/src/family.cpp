#include "vigfgan/family.hpp"

#include <algorithm>
#include <cmath>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"

namespace vig {

namespace {
const double kPi = std::acos(-1.0);
}

Domain1D::Domain1D(double a_, double b_, int n_) : a(a_), b(b_), n(n_ + (n_ % 2)) {
  if (!(b > a)) throw DomainError("domain needs a < b");
  if (n < 64) throw DomainError("domain grid needs n >= 64");
}

GridFn::GridFn(Domain1D d, std::vector<double> vals) : dom(d), v(std::move(vals)) {
  if (static_cast<int>(v.size()) != dom.size()) throw DomainError("grid size mismatch");
}

GridFn GridFn::sample(const Domain1D& d, const std::function<double(double)>& f) {
  GridFn g(d);
  for (int i = 0; i < d.size(); ++i) g.v[i] = f(d.x(i));
  return g;
}

double GridFn::integrate() const {
  return vig::integrate(dom, [this](double, int i) { return v[i]; });
}

double GridFn::at(double x) const {
  if (x < dom.a || x > dom.b) throw DomainError("grid function evaluated outside its domain");
  const double t = (x - dom.a) / dom.dx();
  const int i = std::min(static_cast<int>(t), dom.n - 1);
  const double w = t - i;
  return (1.0 - w) * v[i] + w * v[i + 1];
}

double integrate(const Domain1D& d, const std::function<double(double, int)>& f) {
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < d.n; ++i) (i % 2 ? odd : even) += f(d.x(i), i);
  return d.dx() / 3.0 * (f(d.a, 0) + f(d.b, d.n) + 4.0 * odd + 2.0 * even);
}

GridFn map(const GridFn& g, const std::function<double(double)>& f) {
  GridFn out(g.dom);
  for (int i = 0; i < g.size(); ++i) out.v[i] = f(g.v[i]);
  return out;
}

GridFn pointwise(const GridFn& g, const GridFn& h, const std::function<double(double, double)>& f) {
  if (g.dom.n != h.dom.n || g.dom.a != h.dom.a || g.dom.b != h.dom.b)
    throw DomainError("grid functions live on different domains");
  GridFn out(g.dom);
  for (int i = 0; i < g.size(); ++i) out.v[i] = f(g.v[i], h.v[i]);
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch between phi and theta");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double DeformedDensity::operator()(double x) const {
  if (x < dom.a || x > dom.b) throw DomainError("density evaluated outside its domain");
  return exp_chi_clamped(sig, dot(phi(x), theta) - C);
}

GridFn DeformedDensity::grid() const {
  return GridFn::sample(dom, [this](double x) { return (*this)(x); });
}

double solve_cumulant(const Signature& sig, const Phi& phi, const std::vector<double>& theta,
                      const Domain1D& dom) {
  std::vector<double> s(dom.size());
  for (int i = 0; i < dom.size(); ++i) s[i] = dot(phi(dom.x(i)), theta);
  auto mass = [&](double C) {
    return integrate(dom, [&](double, int i) { return exp_chi_clamped(sig, s[i] - C); });
  };
  constexpr double kLimit = 1e6;
  // The mass is non-increasing in C; expand a bracket around 0.
  double lo = 0.0, hi = 0.0;
  double step = 1.0;
  while (!(mass(lo) > 1.0)) {
    lo -= step;
    step *= 2.0;
    if (lo < -kLimit) throw NoBracket("no cumulant normalizes the family (mass too small)");
  }
  step = 1.0;
  while (!(mass(hi) < 1.0)) {
    hi += step;
    step *= 2.0;
    if (hi > kLimit) throw NoBracket("no cumulant normalizes the family (mass too large)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double m = mass(mid);
    if (m == 1.0) return mid;
    if (m > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  // pick the endpoint with the smaller normalization error
  return std::fabs(mass(lo) - 1.0) < std::fabs(mass(hi) - 1.0) ? lo : hi;
}

DeformedDensity make_deformed(const Signature& sig, const Phi& phi, const std::vector<double>& theta,
                              const Domain1D& dom) {
  return {sig, phi, theta, solve_cumulant(sig, phi, theta, dom), dom};
}

double density_at(const DeformedDensity& d, double x) { return d(x); }

Escort escort_of(const GridFn& base, const Signature& sig) {
  GridFn chi_p = map(base, [&](double p) { return sig(p); });
  const double Z = chi_p.integrate();
  if (!std::isfinite(Z) || !(Z > 0.0)) throw DivergentNormalizer("escort normalizer is not finite and positive");
  GridFn dens = map(chi_p, [Z](double c) { return c / Z; });
  return {base, sig, Z, std::move(dens)};
}

GridFn gaussian_density(const Domain1D& d, double mean, double sd) {
  return GridFn::sample(d, [=](double x) {
    const double u = (x - mean) / sd;
    return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * kPi));
  });
}

GridFn uniform_density(const Domain1D& d, double lo, double hi) {
  return GridFn::sample(d, [=](double x) { return (x >= lo && x <= hi) ? 1.0 / (hi - lo) : 0.0; });
}

GridFn half_gaussian_density(const Domain1D& d, double sigma, double A) {
  return GridFn::sample(d, [=](double x) {
    const double u = 1.0 - x * x / (sigma * sigma);
    return u > 0.0 ? A / sigma * u * u : 0.0;
  });
}

GridFn two_square_density(double eps, int n) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("two-square density needs eps in (0,1)");
  const double tall = std::sqrt(1.0 - eps * eps);
  Domain1D d(0.0, eps + tall, n);
  return GridFn::sample(d, [=](double x) { return x < eps ? eps : tall; });
}

Phi phi_linear() {
  return [](double x) { return std::vector<double>{x}; };
}

Phi phi_quadratic() {
  return [](double x) { return std::vector<double>{x, x * x}; };
}

}  // namespace vig
