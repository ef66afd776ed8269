#include "vigfgan/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"

namespace vig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

double xlogx(double z) { return z > 0.0 ? z * std::log(z) : 0.0; }

// 1 / (level + eps - xi(t)) below t_cut, 1/eps from t_cut on.
struct SubgradientChiImpl final : Signature::Impl {
  DivergenceSpec spec;
  double level, eps, t_cut;
  std::string label;
  SubgradientChiImpl(DivergenceSpec s, double lv, double e, double tc, std::string l)
      : spec(std::move(s)), level(lv), eps(e), t_cut(tc), label(std::move(l)) {}

  double eval(double t) const override {
    if (t >= t_cut) return 1.0 / eps;
    if (t <= 0.0) return 0.0;
    const double den = level + eps - spec.xi(t);
    return std::isinf(den) ? 0.0 : 1.0 / den;
  }
  double inverse(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0 / eps) return t_cut;
    if (spec.xi_inv) return spec.xi_inv(level + eps - 1.0 / y);
    return Signature::Impl::inverse(y);
  }
  double F(double z) const { return (level + eps) * z - spec.f(z); }
  std::optional<double> log(double z) const override {
    if (z <= t_cut) return F(z) - F(1.0);
    return F(t_cut) - F(1.0) + eps * (z - t_cut);
  }
  double log_inf() const override {
    const double f0 = spec.f(0.0);
    return std::isfinite(f0) ? -f0 - F(1.0) : -kInf;
  }
  SigKind kind() const override { return SigKind::Custom; }
  std::string name() const override { return label; }
};

}  // namespace

namespace divergences {

DivergenceSpec kl() {
  return {"kl",
          [](double z) { return xlogx(z); },
          [](double z) { return std::log(z) + 1.0; },
          [](double t) { return std::exp(t - 1.0); },
          [](double t) { return std::exp(t - 1.0); },
          kInf};
}

DivergenceSpec reverse_kl() {
  return {"reverse_kl",
          [](double z) { return z > 0.0 ? -std::log(z) : kInf; },
          [](double z) { return -1.0 / z; },
          [](double t) { return t < 0.0 ? -1.0 - std::log(-t) : kInf; },
          [](double t) { return t < 0.0 ? -1.0 / t : kInf; },
          0.0};
}

DivergenceSpec gan() {
  return {"gan",
          [](double z) { return xlogx(z) - (z + 1.0) * std::log1p(z) + 2.0 * kLn2; },
          [](double z) { return -std::log1p(1.0 / z); },
          [](double t) { return t < 0.0 ? -std::log(-std::expm1(t)) - 2.0 * kLn2 : kInf; },
          [](double t) { return t < 0.0 ? -1.0 / std::expm1(t) - 1.0 : kInf; },
          0.0};
}

DivergenceSpec pearson() {
  return {"pearson",
          [](double z) { return (z - 1.0) * (z - 1.0); },
          [](double z) { return 2.0 * (z - 1.0); },
          [](double t) { return t >= -2.0 ? t + 0.25 * t * t : -1.0; },
          [](double t) { return std::max(0.0, 1.0 + 0.5 * t); },
          kInf};
}

DivergenceSpec neyman() {
  return {"neyman",
          [](double z) { return z > 0.0 ? (z - 1.0) * (z - 1.0) / z : kInf; },
          [](double z) { return 1.0 - 1.0 / (z * z); },
          [](double t) { return t < 1.0 ? 2.0 - 2.0 * std::sqrt(1.0 - t) : kInf; },
          [](double t) { return t < 1.0 ? 1.0 / std::sqrt(1.0 - t) : kInf; },
          1.0};
}

DivergenceSpec jensen_shannon() {
  return {"jensen_shannon",
          [](double z) { return 0.5 * (xlogx(z) - (z + 1.0) * std::log(0.5 * (z + 1.0))); },
          [](double z) { return 0.5 * std::log(2.0 * z / (z + 1.0)); },
          [](double t) {
            const double e = std::exp(2.0 * t);
            return e < 2.0 ? -0.5 * std::log(2.0 - e) : kInf;
          },
          [](double t) {
            const double e = std::exp(2.0 * t);
            return e < 2.0 ? e / (2.0 - e) : kInf;
          },
          0.5 * kLn2};
}

DivergenceSpec from_signature(const Signature& sig) {
  DivergenceSpec s;
  s.name = "neg_log_chi(" + sig.name() + ")";
  s.f = [sig](double z) {
    if (z <= 0.0) return -log_chi_inf(sig);
    return -log_chi(sig, z);
  };
  s.xi = [sig](double z) { return -1.0 / sig(z); };
  s.slope_inf = -1.0 / sig(1e300);
  s.conj = nullptr;
  return s;
}

DivergenceSpec csiszar_dual(const DivergenceSpec& spec) {
  DivergenceSpec s;
  s.name = spec.name + "_dual";
  s.f = [spec](double z) { return z > 0.0 ? z * spec.f(1.0 / z) : spec.slope_inf; };
  s.xi = [spec](double z) { return spec.f(1.0 / z) - spec.xi(1.0 / z) / z; };
  s.slope_inf = spec.f(0.0);
  s.conj = nullptr;
  return s;
}

DivergenceSpec affine(const DivergenceSpec& spec, double k) {
  DivergenceSpec s = spec;
  s.name = spec.name + "_affine";
  s.f = [spec, k](double z) { return spec.f(z) + k * (z - 1.0); };
  s.xi = [spec, k](double z) { return spec.xi(z) + k; };
  s.conj = spec.conj ? std::function<double(double)>([spec, k](double t) { return spec.conj(t - k) + k; })
                     : nullptr;
  s.xi_inv = spec.xi_inv ? std::function<double(double)>([spec, k](double t) { return spec.xi_inv(t - k); })
                         : nullptr;
  s.slope_inf = spec.slope_inf + k;
  return s;
}

DivergenceSpec by_name(const std::string& name) {
  if (name == "kl") return kl();
  if (name == "reverse_kl") return reverse_kl();
  if (name == "gan") return gan();
  if (name == "pearson") return pearson();
  if (name == "neyman") return neyman();
  if (name == "jensen_shannon" || name == "js") return jensen_shannon();
  throw DomainError("unknown divergence '" + name + "'");
}

}  // namespace divergences

double numeric_conjugate(const DivergenceSpec& spec, double t) {
  auto obj = [&](double s) {
    const double z = std::exp(s);
    return z * t - spec.f(z);
  };
  const double s = num::golden_max(obj, -40.0, 40.0, 1e-13);
  return std::max(obj(s), -spec.f(0.0));
}

double f_term(const DivergenceSpec& spec, double p, double q) {
  const double fl = num::kDensityFloor;
  if (p <= fl && q <= fl) return 0.0;
  if (q <= fl) return p * spec.slope_inf;
  return q * spec.f(p / q);
}

double kl_chi_term(const Signature& sig, double p, double q) {
  const double fl = num::kDensityFloor;
  if (p <= fl && q <= fl) return 0.0;
  // p -> 0: p (-log_chi(q/p)) -> -q / chi(inf)
  if (p <= fl) return -q / sig(1e300);
  const double r = std::max(q / p, fl);
  return p * -log_chi(sig, r);
}

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v) || std::fabs(v) > num::kDivergenceCap)
    throw DivergentIntegral(std::string(what) + " diverges");
  return v;
}

}  // namespace

double f_divergence(const DivergenceSpec& spec, const GridFn& P, const GridFn& Q) {
  auto g = pointwise(P, Q, [&](double p, double q) { return f_term(spec, p, q); });
  return checked(g.integrate(), "f-divergence");
}

double kl_chi(const Signature& sig, const GridFn& P, const GridFn& Q) {
  auto g = pointwise(P, Q, [&](double p, double q) { return kl_chi_term(sig, p, q); });
  return checked(g.integrate(), "KL_chi");
}

double kl_chi_scaled(const Signature& sig, const GridFn& weight, const GridFn& P, const GridFn& Q) {
  GridFn g(P.dom);
  const double fl = num::kDensityFloor;
  for (int i = 0; i < g.size(); ++i) {
    const double w = weight[i], p = P[i], q = Q[i];
    if (p <= fl && q <= fl) continue;
    if (w <= fl) {
      if (p <= fl) continue;
      throw DomainError("scaled KL_chi needs a positive weight where P > 0");
    }
    g[i] = kl_chi_term(scaled(sig, w), p, q);
  }
  return checked(g.integrate(), "scaled KL_chi");
}

Signature chi_from_f(const DivergenceSpec& spec, double M, double eps) {
  if (!(eps > 0.0)) throw DomainError("chi_from_f needs eps > 0");
  double t_cut = kInf;
  for (int i = 0; i <= 400; ++i) {
    const double z = std::pow(10.0, -8.0 + 16.0 * i / 400.0);
    if (spec.xi(z) > M + 1e-12)
      throw SubgradientUnbounded("subgradient of " + spec.name + " exceeds M on the probe grid");
  }
  // xi may reach M exactly at some finite point (e.g. Neyman as z -> inf does not); find it.
  if (spec.xi(1e8) >= M) t_cut = num::bisect_first([&](double z) { return spec.xi(z) >= M; }, 0.0, 1e8);
  return Signature(std::make_shared<SubgradientChiImpl>(spec, M, eps, t_cut,
                                                        "chi_from_f(" + spec.name + ")"));
}

TruncatedChi chi_from_f_truncated(const DivergenceSpec& spec, double t_star, double eps, double M) {
  if (!(eps > 0.0)) throw DomainError("chi_from_f_truncated needs eps > 0");
  const double level = spec.xi(t_star);
  if (!std::isfinite(level)) throw DomainError("xi(t*) must be finite");
  auto sig = Signature(std::make_shared<SubgradientChiImpl>(spec, level, eps, t_star,
                                                            "chi_trunc(" + spec.name + ")"));
  return {sig, t_star >= M ? 0.0 : spec.f(M) - spec.f(t_star)};
}

double bregman(const BregmanGenerator& gen, const std::vector<double>& theta,
               const std::vector<double>& rho) {
  if (theta.size() != rho.size()) throw DomainError("Bregman arguments differ in dimension");
  const auto g = gen.gradient(rho);
  double v = gen.varphi(theta) - gen.varphi(rho);
  for (size_t i = 0; i < theta.size(); ++i) v -= (theta[i] - rho[i]) * g[i];
  if (!std::isfinite(v)) throw DomainError("Bregman divergence outside the generator domain");
  return v;
}

BregmanGenerator half_squared_norm() {
  return {[](const std::vector<double>& t) {
            double s = 0.0;
            for (double v : t) s += v * v;
            return 0.5 * s;
          },
          [](const std::vector<double>& t) { return t; }};
}

double cumulant(const Signature& sig, const Phi& phi, const std::vector<double>& theta,
                const Domain1D& dom) {
  if (sig.kind() != SigKind::Identity) return solve_cumulant(sig, phi, theta, dom);
  std::vector<double> s(dom.size());
  double m = -kInf;
  for (int i = 0; i < dom.size(); ++i) {
    s[i] = dot(phi(dom.x(i)), theta);
    m = std::max(m, s[i]);
  }
  const double mass = integrate(dom, [&](double, int i) { return std::exp(s[i] - m); });
  return m + std::log(mass);
}

BregmanGenerator cumulant_generator(const Signature& sig, const Phi& phi, const Domain1D& dom,
                                    double step) {
  auto C = [=](const std::vector<double>& t) { return cumulant(sig, phi, t, dom); };
  auto grad = [=](const std::vector<double>& t) {
    std::vector<double> g(t.size());
    for (size_t i = 0; i < t.size(); ++i) {
      auto up = t, dn = t;
      up[i] += step;
      dn[i] -= step;
      g[i] = (C(up) - C(dn)) / (2.0 * step);
    }
    return g;
  };
  return {C, grad};
}

namespace {

GridFn exp_family(const Phi& phi, const std::vector<double>& theta, double C, const Domain1D& dom) {
  return GridFn::sample(dom, [&](double x) { return std::exp(dot(phi(x), theta) - C); });
}

}  // namespace

Theorem1Result theorem1_check(const Phi& phi, const std::vector<double>& theta_p,
                              const std::vector<double>& theta_q, const Domain1D& dom) {
  const auto id = Signature::identity();
  auto gen = cumulant_generator(id, phi, dom);
  auto P = exp_family(phi, theta_p, gen.varphi(theta_p), dom);
  auto Q = exp_family(phi, theta_q, gen.varphi(theta_q), dom);
  return {f_divergence(divergences::kl(), P, Q), bregman(gen, theta_q, theta_p)};
}

GeneralizedTheorem1Result generalized_theorem1_check(const Phi& phi_p, const std::vector<double>& theta_p,
                                                     const Phi& phi_q, const std::vector<double>& theta_q,
                                                     const Domain1D& dom) {
  const auto id = Signature::identity();
  auto gen_p = cumulant_generator(id, phi_p, dom);
  auto gen_q = cumulant_generator(id, phi_q, dom);
  const double Cq = gen_q.varphi(theta_q);
  auto P = exp_family(phi_p, theta_p, gen_p.varphi(theta_p), dom);
  auto Q = exp_family(phi_q, theta_q, Cq, dom);
  const double kl = f_divergence(divergences::kl(), P, Q);
  const double d_param = bregman(gen_p, theta_q, theta_p);
  double cross = 0.0;
  for (size_t j = 0; j < theta_q.size(); ++j) {
    const double e = integrate(dom, [&](double x, int i) { return P[i] * (phi_q(x)[j] - phi_p(x)[j]); });
    cross += e * theta_q[j];
  }
  const double d_cumulant = Cq - gen_p.varphi(theta_q) - cross;
  return {kl, d_param, d_cumulant};
}

double lemma1_invariance_check(const Signature& sig, const std::vector<double>& ks, const GridFn& P,
                               const GridFn& Q) {
  const double base = kl_chi(sig, P, Q);
  double worst = 0.0;
  for (double k : ks) {
    if (k < 0.0) throw DomainError("damping constants must be >= 0");
    worst = std::max(worst, std::fabs(kl_chi(damped(sig, k), P, Q) - base));
  }
  return worst;
}

}  // namespace vig
