#include "vigfgan/proper_loss.hpp"

#include <cmath>
#include <limits>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"
#include "vigfgan/vig.hpp"

namespace vig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDerivCap = 1e12;

void require_unit(double z, const char* who) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError(std::string(who) + ": argument must lie in (0,1)");
}

double ratio_of(double u) { return u / (1.0 - u); }

// (f')^{-1}(v), by bisection in log r when no closed form is available.
double xi_inverse(const DivergenceSpec& f, double v) {
  if (f.xi_inv) return f.xi_inv(v);
  auto g = [&](double s) { return f.xi(std::exp(s)) - v; };
  const double lo = -700.0, hi = 700.0;
  if (g(lo) > 0.0 || g(hi) < 0.0) throw RangeError("value outside the image of f'");
  return std::exp(num::bisect_root(g, lo, hi));
}

}  // namespace

double matsushita_link(double v) {
  if (!std::isfinite(v)) throw DomainError("matsushita_link needs a finite argument");
  return 0.5 * (1.0 + v / std::sqrt(1.0 + v * v));
}

namespace links {

LinkFunction canonical(const DivergenceSpec& f) {
  LinkFunction L{LinkKind::Canonical, "canonical(" + f.name + ")", {}, {}};
  L.eval = [f](double z) {
    require_unit(z, "canonical link");
    return f.xi(ratio_of(z));
  };
  L.inverse = [f](double v) {
    const double r = xi_inverse(f, v);
    if (!(r > 0.0) || std::isinf(r)) throw RangeError("value outside the image of the canonical link");
    return r / (1.0 + r);
  };
  return L;
}

LinkFunction sigmoid() {
  LinkFunction L{LinkKind::Sigmoid, "sigmoid", {}, {}};
  L.eval = [](double z) {
    require_unit(z, "sigmoid link");
    return std::log(z) - std::log1p(-z);
  };
  L.inverse = [](double v) {
    if (!std::isfinite(v)) throw RangeError("sigmoid link inverse needs a finite value");
    return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  };
  return L;
}

LinkFunction matsushita() {
  LinkFunction L{LinkKind::Matsushita, "matsushita", {}, {}};
  L.eval = [](double z) {
    require_unit(z, "matsushita link");
    const double w = 2.0 * z - 1.0;
    return w / std::sqrt((1.0 - w) * (1.0 + w));
  };
  L.inverse = [](double v) {
    if (!std::isfinite(v)) throw RangeError("matsushita link inverse needs a finite value");
    return matsushita_link(v);
  };
  return L;
}

LinkFunction vig(const Signature& sig, double q) {
  if (!(q > 0.0)) throw DomainError("vig link needs q > 0");
  LinkFunction L{LinkKind::VigLink, "vig(" + sig.name() + ")", {}, {}};
  L.eval = [sig, q](double z) {
    require_unit(z, "vig link");
    return -q / sig(q * ratio_of(z));
  };
  L.inverse = [sig, q](double v) {
    if (!(v < 0.0)) throw RangeError("vig link values are negative");
    const double r = sig.inverse(-q / v) / q;
    if (!(r > 0.0) || std::isinf(r)) throw RangeError("value outside the image of the vig link");
    return r / (1.0 + r);
  };
  return L;
}

LinkFunction identity() {
  LinkFunction L{LinkKind::IdentityLink, "identity", {}, {}};
  L.eval = [](double z) {
    require_unit(z, "identity link");
    return z;
  };
  L.inverse = [](double v) {
    if (!(v > 0.0 && v < 1.0)) throw RangeError("identity link inverse needs a value in (0,1)");
    return v;
  };
  return L;
}

LinkFunction by_name(const std::string& name) {
  if (name == "sigmoid") return sigmoid();
  if (name == "matsushita") return matsushita();
  if (name == "identity") return identity();
  throw DomainError("unknown link: " + name);
}

}  // namespace links

double clamped_derivative(const DivergenceSpec& f, double r) {
  double d;
  if (r <= 0.0) d = f.xi(std::numeric_limits<double>::min());
  else if (std::isinf(r)) d = f.slope_inf;
  else d = f.xi(r);
  if (!(std::fabs(d) <= kDerivCap)) throw RangeError("f' beyond 1e12 at the requested ratio");
  return d;
}

ProperLoss build_loss(const DivergenceSpec& f, const LinkFunction& link) {
  constexpr int n = 999;
  double prev = link.eval(1.0 / (n + 1));
  int sign = 0;
  for (int i = 2; i <= n; ++i) {
    const double cur = link.eval(static_cast<double>(i) / (n + 1));
    const int s = cur > prev ? 1 : (cur < prev ? -1 : 0);
    if (!std::isfinite(cur) || s == 0 || (sign != 0 && s != sign))
      throw NonInvertibleLink("link is not strictly monotone on (0,1)");
    sign = s;
    prev = cur;
  }
  ProperLoss L{f, link, {}, {}};
  L.loss_pos = [f, link](double z) { return -clamped_derivative(f, ratio_of(link.inverse(z))); };
  L.loss_neg = [f, link](double z) {
    const double u = link.inverse(z);
    if (u >= 1.0) {
      const double c = f.conj(clamped_derivative(f, kInf));
      if (!std::isfinite(c)) throw RangeError("f* infinite at the limit of f'");
      return c;
    }
    const double r = ratio_of(u);
    const double d = clamped_derivative(f, r);
    // Fenchel equality f*(f'(r)) = r f'(r) - f(r)
    return r > 0.0 ? r * d - f.f(r) : -f.f(0.0);
  };
  return L;
}

ProperLoss vig_loss(const Signature& sig, double q) {
  if (!(q > 0.0)) throw DomainError("vig loss needs q > 0");
  ProperLoss L{divergences::from_signature(scaled(sig, q)), links::vig(sig, q), {}, {}};
  L.loss_pos = [](double z) { return -z; };
  L.loss_neg = [sig, q](double z) {
    if (z > 0.0) throw DomainError("fake-example loss needs z <= 0");
    if (z == -1.0) return 0.0;
    return conjugate_B(sig, q, z);
  };
  return L;
}

double density_ratio_recover(const LinkFunction& link, double t_star) {
  const double u = link.inverse(t_star);
  if (!(u > 0.0 && u < 1.0)) throw RangeError("link inverse left (0,1)");
  return ratio_of(u);
}

double expected_loss(const ProperLoss& loss, const GridFn& P, const GridFn& Q, const GridFn& T) {
  const double fl = num::kDensityFloor;
  return integrate(T.dom, [&](double, int i) {
    double v = 0.0;
    if (P[i] > fl) v += P[i] * loss.loss_pos(T[i]);
    if (Q[i] > fl) v += Q[i] * loss.loss_neg(T[i]);
    return 0.5 * v;
  });
}

double min_expected_loss(const ProperLoss& loss, const GridFn& P, const GridFn& Q) {
  const double fl = num::kDensityFloor;
  return integrate(P.dom, [&](double, int i) {
    const double p = P[i] > fl ? P[i] : 0.0, q = Q[i] > fl ? Q[i] : 0.0;
    if (p == 0.0 && q == 0.0) return 0.0;
    auto risk = [&](double s) {
      const double v = loss.link.eval(1.0 / (1.0 + std::exp(-s)));
      double r = 0.0;
      if (p > 0.0) r += p * loss.loss_pos(v);
      if (q > 0.0) r += q * loss.loss_neg(v);
      return 0.5 * r;
    };
    const double s = num::golden_min(risk, -35.0, 35.0, 1e-10);
    return risk(s);
  });
}

GridFn bayes_discriminator(const LinkFunction& link, const GridFn& P, const GridFn& Q) {
  return pointwise(P, Q, [&](double p, double q) { return link.eval(1.0 / (1.0 + q / p)); });
}

}  // namespace vig
