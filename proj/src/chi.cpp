#include "vigfgan/chi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"

namespace vig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

std::string fmt_param(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Log-space quadrature: int_1^z dt/chi(t) = int_0^{ln z} e^s / chi(e^s) ds.
double log_by_quadrature(const Signature& sig, double z) {
  const double s_end = std::log(z);
  auto integrand = [&](double s) {
    const double t = std::exp(s);
    return t / std::max(sig.eval(t), num::kChiFloor);
  };
  const double v = num::simpson(integrand, 0.0, s_end, 1e-10, 40);
  if (!std::isfinite(v) || std::fabs(v) > num::kDivergenceCap)
    throw DivergentIntegral("log_chi(" + sig.name() + ") diverges at z=" + fmt_param(z));
  return v;
}

// Solves log_chi(x) = y for x by bracketing in s = ln x, then safeguarded Newton.
// Returns nullopt when y lies below the image of log_chi.
std::optional<double> exp_by_solve(const Signature& sig, double y) {
  auto F = [&](double s) { return log_chi(sig, std::exp(s)) - y; };
  double lo = 0.0, hi = 0.0;
  double f0 = -y;
  if (f0 == 0.0) return 1.0;
  double flo, fhi;
  if (f0 < 0.0) {
    flo = f0;
    double step = 1.0;
    for (;;) {
      hi = lo + step;
      if (hi > 700.0) return kInf;
      fhi = F(hi);
      if (fhi >= 0.0) break;
      lo = hi;
      flo = fhi;
      step *= 2.0;
    }
  } else {
    fhi = f0;
    double step = 1.0;
    for (;;) {
      lo = hi - step;
      if (lo < -700.0) return std::nullopt;
      flo = F(lo);
      if (flo <= 0.0) break;
      hi = lo;
      fhi = flo;
      step *= 2.0;
    }
  }
  double s = (flo == fhi) ? lo : lo - flo * (hi - lo) / (fhi - flo);
  for (int it = 0; it < 200; ++it) {
    const double fs = F(s);
    if (fs == 0.0) break;
    if (fs < 0.0)
      lo = s;
    else
      hi = s;
    const double x = std::exp(s);
    const double slope = x / std::max(sig.eval(x), num::kChiFloor);
    double next = s - fs / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - s) <= 1e-15 * std::max(1.0, std::fabs(s)) || hi - lo <= 1e-15) {
      s = next;
      break;
    }
    s = next;
  }
  return std::exp(s);
}

struct IdentityImpl final : Signature::Impl {
  double eval(double z) const override { return z; }
  double inverse(double y) const override { return y; }
  std::optional<double> derivative(double) const override { return 1.0; }
  std::optional<double> log(double z) const override { return std::log(z); }
  std::optional<double> exp(double y) const override { return std::exp(y); }
  SigKind kind() const override { return SigKind::Identity; }
  std::string name() const override { return "identity"; }
};

struct PowerQImpl final : Signature::Impl {
  double q;
  explicit PowerQImpl(double q_) : q(q_) {}
  double eval(double z) const override { return std::pow(z, q); }
  double inverse(double y) const override { return std::pow(y, 1.0 / q); }
  std::optional<double> derivative(double z) const override {
    return q * std::pow(z, q - 1.0);
  }
  std::optional<double> log(double z) const override {
    if (q == 1.0) return std::log(z);
    return std::expm1((1.0 - q) * std::log(z)) / (1.0 - q);
  }
  std::optional<double> exp(double y) const override {
    if (q == 1.0) return std::exp(y);
    const double base = 1.0 + (1.0 - q) * y;
    if (base <= 0.0) return (q < 1.0) ? 0.0 : kInf;
    return std::exp(std::log1p((1.0 - q) * y) / (1.0 - q));
  }
  double log_inf() const override { return q < 1.0 ? -1.0 / (1.0 - q) : -kInf; }
  double log_sup() const override { return q > 1.0 ? 1.0 / (q - 1.0) : kInf; }
  SigKind kind() const override { return SigKind::PowerQ; }
  std::string name() const override { return "power_q(" + fmt_param(q) + ")"; }
};

struct GanImpl final : Signature::Impl {
  double eval(double z) const override {
    if (z <= 0.0) return 0.0;
    return 1.0 / std::log1p(1.0 / z);
  }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    return 1.0 / std::expm1(1.0 / y);
  }
  std::optional<double> derivative(double z) const override {
    if (z <= 0.0) return std::nullopt;
    const double L = std::log1p(1.0 / z);
    return 1.0 / (L * L * z * (z + 1.0));
  }
  std::optional<double> log(double z) const override {
    // (z+1) log(z+1) - z log z, minus its value at 1.
    const double F = (z + 1.0) * std::log1p(z) - (z > 0.0 ? z * std::log(z) : 0.0);
    return F - 2.0 * kLn2;
  }
  double log_inf() const override { return -2.0 * kLn2; }
  SigKind kind() const override { return SigKind::Gan; }
  std::string name() const override { return "gan"; }
};

struct SoftplusChiImpl final : Signature::Impl {
  double eval(double z) const override { return -std::expm1(-z * kLn2) / kLn2; }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y * kLn2 >= 1.0) return kInf;
    return -std::log1p(-y * kLn2) / kLn2;
  }
  std::optional<double> derivative(double z) const override { return std::exp(-z * kLn2); }
  std::optional<double> log(double z) const override {
    return std::log(std::expm1(z * kLn2));
  }
  std::optional<double> exp(double y) const override {
    const double lp = (y > 30.0) ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
    return lp / kLn2;
  }
  SigKind kind() const override { return SigKind::Table; }
  std::string name() const override { return "softplus_chi"; }
};

struct MuReluChiImpl final : Signature::Impl {
  double mu, c;
  explicit MuReluChiImpl(double mu_) : mu(mu_), c(1.0 - mu_) {}
  double eval(double z) const override { return 4.0 * z * z / (c * c + 4.0 * z * z); }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return kInf;
    return 0.5 * c * std::sqrt(y / (1.0 - y));
  }
  std::optional<double> derivative(double z) const override {
    const double den = c * c + 4.0 * z * z;
    return 8.0 * z * c * c / (den * den);
  }
  double F(double z) const { return z - c * c / (4.0 * z); }
  std::optional<double> log(double z) const override { return F(z) - F(1.0); }
  std::optional<double> exp(double y) const override {
    const double s = y + F(1.0);
    const double r = std::hypot(s, c);
    return s >= 0.0 ? 0.5 * (s + r) : 0.5 * c * c / (r - s);
  }
  SigKind kind() const override { return SigKind::Table; }
  std::string name() const override { return "mu_relu_chi(" + fmt_param(mu) + ")"; }
};

struct EluChiImpl final : Signature::Impl {
  double alpha, beta;
  EluChiImpl(double a, double b) : alpha(a), beta(b) {}
  double eval(double z) const override { return z > alpha ? beta : z; }
  double inverse(double y) const override {
    if (y <= alpha) return std::max(y, 0.0);
    if (y <= beta) return alpha;
    return kInf;
  }
  std::optional<double> derivative(double z) const override {
    if (z == alpha && alpha != beta) return std::nullopt;
    return z < alpha ? 1.0 : 0.0;
  }
  double F(double z) const {
    return z <= alpha ? std::log(z) : std::log(alpha) + (z - alpha) / beta;
  }
  std::optional<double> log(double z) const override { return F(z) - F(1.0); }
  std::optional<double> exp(double y) const override {
    const double s = y + F(1.0);
    if (s <= std::log(alpha)) return std::exp(s);
    return alpha + beta * (s - std::log(alpha));
  }
  SigKind kind() const override { return SigKind::Table; }
  std::string name() const override {
    return "elu_chi(" + fmt_param(alpha) + "," + fmt_param(beta) + ")";
  }
};

struct LsuChiImpl final : Signature::Impl {
  double eval(double z) const override { return z < 4.0 ? 2.0 * std::sqrt(std::max(z, 0.0)) : 4.0; }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y <= 4.0) return 0.25 * y * y;
    return kInf;
  }
  std::optional<double> derivative(double z) const override {
    if (z <= 0.0) return std::nullopt;
    return z < 4.0 ? 1.0 / std::sqrt(z) : 0.0;
  }
  static double F(double z) { return z <= 4.0 ? std::sqrt(z) : 2.0 + 0.25 * (z - 4.0); }
  std::optional<double> log(double z) const override { return F(z) - 1.0; }
  std::optional<double> exp(double y) const override {
    const double s = y + 1.0;
    if (s <= 0.0) return 0.0;
    if (s <= 2.0) return s * s;
    return 4.0 + 4.0 * (s - 2.0);
  }
  double log_inf() const override { return -1.0; }
  SigKind kind() const override { return SigKind::Table; }
  std::string name() const override { return "lsu_chi"; }
};

struct LeakyImpl final : Signature::Impl {
  Signature base;
  double delta, eps;
  LeakyImpl(Signature b, double d, double e) : base(std::move(b)), delta(d), eps(e) {}
  double eval(double z) const override {
    return z < delta ? eps * z : eps * delta + base(z - delta);
  }
  double inverse(double y) const override {
    if (y < eps * delta) return std::max(y, 0.0) / eps;
    return delta + base.inverse(y - eps * delta);
  }
  std::optional<double> derivative(double z) const override {
    if (z < delta) return eps;
    if (!base.has_exact_derivative()) return std::nullopt;
    return base.derivative(z - delta);
  }
  SigKind kind() const override { return SigKind::LeakyChi; }
  std::string name() const override {
    return "leaky(" + base.name() + "," + fmt_param(delta) + "," + fmt_param(eps) + ")";
  }
};

struct PiecewiseImpl final : Signature::Impl {
  std::vector<std::pair<double, double>> knots;
  explicit PiecewiseImpl(std::vector<std::pair<double, double>> k) : knots(std::move(k)) {}
  double eval(double z) const override {
    if (z <= knots.front().first) return knots.front().second;
    if (z >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(knots.begin(), knots.end(), z,
                               [](double v, const auto& kn) { return v < kn.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (z - x0) / (x1 - x0);
  }
  SigKind kind() const override { return SigKind::Piecewise; }
  std::string name() const override { return "piecewise(" + std::to_string(knots.size()) + ")"; }
};

struct KInftyImpl final : Signature::Impl {
  double K, eps, lK;
  KInftyImpl(double k, double e) : K(k), eps(e), lK(std::log(k)) {}
  double eval(double z) const override {
    return z <= eps ? z : eps + std::expm1((z - eps) * lK) / lK;
  }
  double inverse(double y) const override {
    if (y <= eps) return std::max(y, 0.0);
    return eps + std::log1p((y - eps) * lK) / lK;
  }
  std::optional<double> derivative(double z) const override {
    return z <= eps ? 1.0 : std::exp((z - eps) * lK);
  }
  SigKind kind() const override { return SigKind::KInfty; }
  std::string name() const override {
    return "k_infinity(" + fmt_param(K) + "," + fmt_param(eps) + ")";
  }
};

struct CustomImpl final : Signature::Impl {
  std::string label;
  std::function<double(double)> f, finv, df;
  double eval(double z) const override { return f(z); }
  double inverse(double y) const override {
    return finv ? finv(y) : Signature::Impl::inverse(y);
  }
  std::optional<double> derivative(double z) const override {
    if (!df) return std::nullopt;
    return df(z);
  }
  SigKind kind() const override { return SigKind::Custom; }
  std::string name() const override { return label; }
};

struct ScaledImpl final : Signature::Impl {
  Signature base;
  double p;
  ScaledImpl(Signature b, double p_) : base(std::move(b)), p(p_) {}
  double eval(double t) const override { return base(t * p) / p; }
  double inverse(double y) const override { return base.inverse(p * y) / p; }
  std::optional<double> derivative(double t) const override {
    if (!base.has_exact_derivative()) return std::nullopt;
    return base.derivative(t * p);
  }
  std::optional<double> log(double z) const override {
    return log_chi(base, p * z) - log_chi(base, p);
  }
  std::optional<double> exp(double y) const override {
    const double shifted = y + log_chi(base, p);
    if (shifted < log_chi_inf(base)) return 0.0;
    return exp_chi_clamped(base, shifted) / p;
  }
  double log_inf() const override { return log_chi_inf(base) - log_chi(base, p); }
  double log_sup() const override { return log_chi_sup(base) - log_chi(base, p); }
  SigKind kind() const override { return SigKind::Scaled; }
  std::string name() const override { return "scaled(" + base.name() + "," + fmt_param(p) + ")"; }
};

struct DualImpl final : Signature::Impl {
  Signature base;
  explicit DualImpl(Signature b) : base(std::move(b)) {}
  double eval(double t) const override {
    if (t <= 0.0) return 0.0;
    const double inv = base.inverse(1.0 / t);
    if (std::isinf(inv)) return 0.0;
    return 1.0 / inv;
  }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    const double c = base(1.0 / y);
    return c > 0.0 ? 1.0 / c : kInf;
  }
  SigKind kind() const override { return SigKind::Dual; }
  std::string name() const override { return "dual(" + base.name() + ")"; }
};

struct DampedImpl final : Signature::Impl {
  Signature base;
  double k;
  DampedImpl(Signature b, double k_) : base(std::move(b)), k(k_) {}
  double eval(double t) const override {
    const double c = base(t);
    return c / (1.0 + k * c);
  }
  double inverse(double y) const override {
    if (y <= 0.0) return base.inverse(0.0);
    if (k * y >= 1.0) return kInf;
    return base.inverse(y / (1.0 - k * y));
  }
  std::optional<double> derivative(double t) const override {
    if (!base.has_exact_derivative()) return std::nullopt;
    const double c = base(t);
    return base.derivative(t) / ((1.0 + k * c) * (1.0 + k * c));
  }
  // 1/chi_k = 1/chi + k
  std::optional<double> log(double z) const override { return vig::log_chi(base, z) + k * (z - 1.0); }
  double log_inf() const override { return vig::log_chi_inf(base) - k; }
  double log_sup() const override { return k > 0.0 ? kInf : vig::log_chi_sup(base); }
  SigKind kind() const override { return SigKind::Damped; }
  std::string name() const override { return "damped(" + base.name() + "," + fmt_param(k) + ")"; }
};

}  // namespace

double Signature::Impl::inverse(double y) const {
  if (y <= eval(0.0)) return 0.0;
  double hi = 1.0;
  while (eval(hi) < y) {
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  return num::bisect_first([&](double z) { return eval(z) >= y; }, 0.0, hi);
}

double Signature::derivative(double z) const {
  if (auto d = impl_->derivative(z)) return *d;
  const double h = 1e-6 * std::max(1.0, std::fabs(z));
  if (z - h < 0.0) return (eval(z + h) - eval(z)) / h;
  return (eval(z + h) - eval(z - h)) / (2.0 * h);
}

bool Signature::has_exact_derivative() const { return impl_->derivative(1.0).has_value(); }

Signature Signature::identity() { return Signature(std::make_shared<IdentityImpl>()); }

Signature Signature::power_q(double q) {
  if (!(q > 0.0)) throw DomainError("power_q needs q > 0");
  return Signature(std::make_shared<PowerQImpl>(q));
}

Signature Signature::gan() { return Signature(std::make_shared<GanImpl>()); }

Signature Signature::leaky(const Signature& base, double delta, double eps) {
  return leaky_chi(base, delta, eps);
}

Signature Signature::piecewise(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw DomainError("piecewise signature needs at least two knots");
  std::sort(knots.begin(), knots.end());
  if (knots.front().first != 0.0) throw DomainError("piecewise signature must start at z=0");
  return Signature(std::make_shared<PiecewiseImpl>(std::move(knots)));
}

Signature Signature::k_infinity(double K, double eps) {
  if (!(K > 1.0) || !(eps > 0.0)) throw DomainError("k_infinity needs K > 1 and eps > 0");
  return Signature(std::make_shared<KInftyImpl>(K, eps));
}

Signature Signature::custom(std::string name, std::function<double(double)> eval,
                            std::function<double(double)> inverse,
                            std::function<double(double)> derivative) {
  auto impl = std::make_shared<CustomImpl>();
  impl->label = std::move(name);
  impl->f = std::move(eval);
  impl->finv = std::move(inverse);
  impl->df = std::move(derivative);
  return Signature(std::move(impl));
}

Signature Signature::softplus_chi() { return Signature(std::make_shared<SoftplusChiImpl>()); }

Signature Signature::mu_relu_chi(double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) throw DomainError("mu must lie in [0,1)");
  return Signature(std::make_shared<MuReluChiImpl>(mu));
}

Signature Signature::elu_chi(double alpha, double beta) {
  if (!(alpha > 0.0 && beta >= alpha)) throw DomainError("elu signature needs beta >= alpha > 0");
  return Signature(std::make_shared<EluChiImpl>(alpha, beta));
}

Signature Signature::lsu_chi() { return Signature(std::make_shared<LsuChiImpl>()); }

double log_chi(const Signature& sig, double z) {
  if (!(z > 0.0)) throw DomainError("log_chi needs z > 0");
  if (z == 1.0) return 0.0;
  if (auto v = sig.impl().log(z)) return *v;
  return log_by_quadrature(sig, z);
}

double log_chi_inf(const Signature& sig) { return sig.impl().log_inf(); }
double log_chi_sup(const Signature& sig) { return sig.impl().log_sup(); }

double exp_chi(const Signature& sig, double y) {
  if (y == 0.0) return 1.0;
  if (y < log_chi_inf(sig))
    throw DomainError("exp_chi argument below the image of log_chi for " + sig.name());
  if (y >= log_chi_sup(sig)) return kInf;
  if (auto v = sig.impl().exp(y)) return *v;
  auto v = exp_by_solve(sig, y);
  if (!v) throw DomainError("exp_chi argument below the image of log_chi for " + sig.name());
  return *v;
}

double exp_chi_clamped(const Signature& sig, double y) {
  if (y == 0.0) return 1.0;
  if (y <= log_chi_inf(sig)) return 0.0;
  if (y >= log_chi_sup(sig)) return kInf;
  if (auto v = sig.impl().exp(y)) return *v;
  return exp_by_solve(sig, y).value_or(0.0);
}

Signature scaled(const Signature& sig, double p) {
  if (!(p > 0.0)) throw DomainError("scaled signature needs p > 0");
  return Signature(std::make_shared<ScaledImpl>(sig, p));
}

Signature dual_signature(const Signature& sig) {
  return Signature(std::make_shared<DualImpl>(sig));
}

Signature damped(const Signature& sig, double k) {
  if (!(k >= 0.0)) throw DomainError("damping constant must be >= 0");
  if (k == 0.0) return sig;
  return Signature(std::make_shared<DampedImpl>(sig, k));
}

Signature leaky_chi(const Signature& base, double delta, double eps) {
  if (!(delta > 0.0) || !(eps > 0.0)) throw DomainError("leaky chi needs delta, eps > 0");
  return Signature(std::make_shared<LeakyImpl>(base, delta, eps));
}

bool is_nondecreasing(const Signature& sig, double lo, double hi, int n) {
  double prev = sig(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = sig(lo + (hi - lo) * i / n);
    if (v < prev) return false;
    prev = v;
  }
  return true;
}

}  // namespace vig
