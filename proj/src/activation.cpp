#include "vigfgan/activation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"

namespace vig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);
const double kPi = std::acos(-1.0);

std::string num_str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct ReluImpl final : Activation::Impl {
  double eval(double z) const override { return z > 0.0 ? z : 0.0; }
  double derivative(double z) const override { return z > 0.0 ? 1.0 : 0.0; }
  std::optional<double> inverse(double v) const override {
    if (v > 0.0) return v;
    return std::nullopt;
  }
  double inf_value() const override { return 0.0; }
  std::optional<Signature> table_chi() const override {
    return Signature::custom("relu_chi", [](double z) { return z > 0.0 ? 1.0 : 0.0; });
  }
  ActKind kind() const override { return ActKind::ReLU; }
  std::string name() const override { return "relu"; }
};

struct LeakyReluImpl final : Activation::Impl {
  double eps, delta;
  LeakyReluImpl(double e, double d) : eps(e), delta(d) {}
  double eval(double z) const override { return z > 0.0 ? z : eps * z; }
  double derivative(double z) const override { return z > 0.0 ? 1.0 : eps; }
  std::optional<double> inverse(double v) const override {
    if (v < delta) return std::nullopt;
    return v > 0.0 ? v : v / eps;
  }
  double domain_lo() const override { return delta / eps; }
  double inf_value() const override { return delta; }
  ActKind kind() const override { return ActKind::LeakyReLU; }
  std::string name() const override {
    return "leaky_relu(" + num_str(eps) + "," + num_str(delta) + ")";
  }
};

struct EluImpl final : Activation::Impl {
  double alpha, beta;
  EluImpl(double a, double b) : alpha(a), beta(b) {}
  double eval(double z) const override { return z > 0.0 ? beta * z : alpha * std::expm1(z); }
  double derivative(double z) const override { return z > 0.0 ? beta : alpha * std::exp(z); }
  std::optional<double> inverse(double v) const override {
    if (v > 0.0) return v / beta;
    if (v <= -alpha) return std::nullopt;
    return std::log1p(v / alpha);
  }
  double inf_value() const override { return -alpha; }
  std::optional<Signature> table_chi() const override { return Signature::elu_chi(alpha, beta); }
  ActKind kind() const override { return ActKind::ELU; }
  std::string name() const override { return "elu(" + num_str(alpha) + "," + num_str(beta) + ")"; }
};

struct MuReluImpl final : Activation::Impl {
  double mu, c;
  explicit MuReluImpl(double m) : mu(m), c(1.0 - m) {}
  double eval(double z) const override {
    const double r = std::hypot(c, z);
    const double s = z >= 0.0 ? z + r : c * c / (r - z);
    return 0.5 * (s - c);
  }
  double derivative(double z) const override {
    const double r = std::hypot(c, z);
    if (z >= 0.0) return 0.5 * (1.0 + z / r);
    return 0.5 * c * c / (r * (r - z));
  }
  std::optional<double> inverse(double v) const override {
    const double h = v + 0.5 * c;
    if (h <= 0.0) return std::nullopt;
    return h - c * c / (4.0 * h);
  }
  double inf_value() const override { return -0.5 * c; }
  std::optional<Signature> table_chi() const override { return Signature::mu_relu_chi(mu); }
  ActKind kind() const override { return ActKind::MuReLU; }
  std::string name() const override { return "mu_relu(" + num_str(mu) + ")"; }
};

struct SoftplusImpl final : Activation::Impl {
  double eval(double z) const override {
    const double sp = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return sp / kLn2 - 1.0;
  }
  double derivative(double z) const override {
    const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return s / kLn2;
  }
  std::optional<double> inverse(double v) const override {
    const double h = v + 1.0;
    if (h <= 0.0) return std::nullopt;
    return std::log(std::expm1(h * kLn2));
  }
  double inf_value() const override { return -1.0; }
  std::optional<Signature> table_chi() const override { return Signature::softplus_chi(); }
  ActKind kind() const override { return ActKind::Softplus; }
  std::string name() const override { return "softplus"; }
};

struct LsuImpl final : Activation::Impl {
  double eval(double z) const override {
    if (z < -1.0) return -1.0;
    if (z <= 1.0) return (1.0 + z) * (1.0 + z) - 1.0;
    return 4.0 * z - 1.0;
  }
  double derivative(double z) const override {
    if (z < -1.0) return 0.0;
    if (z <= 1.0) return 2.0 * (1.0 + z);
    return 4.0;
  }
  std::optional<double> inverse(double v) const override {
    const double h = v + 1.0;
    if (h <= 0.0) return std::nullopt;
    if (h <= 4.0) return std::sqrt(h) - 1.0;
    return h / 4.0;
  }
  double admissible_lo() const override { return -1.0; }
  double inf_value() const override { return -1.0; }
  std::optional<Signature> table_chi() const override { return Signature::lsu_chi(); }
  ActKind kind() const override { return ActKind::LSU; }
  std::string name() const override { return "lsu"; }
};

struct PropTauImpl final : Activation::Impl {
  PropTauSpec spec;
  double t0;
  double lo;
  PropTauImpl(PropTauSpec s, double inf_tau, double adm_lo)
      : spec(std::move(s)), t0(spec.tau_star(0.0)), lo(adm_lo), inf_tau_(inf_tau) {}
  double eval(double z) const override { return spec.tau_star(z) / t0 - 1.0; }
  double derivative(double z) const override { return spec.tau_star_prime(z) / t0; }
  std::optional<double> inverse(double v) const override {
    if (spec.tau_star_inverse) {
      if (v <= inf_value()) return std::nullopt;
      return spec.tau_star_inverse(t0 * (v + 1.0));
    }
    return Activation::Impl::inverse(v);
  }
  double admissible_lo() const override { return lo; }
  double inf_value() const override { return inf_tau_ / t0 - 1.0; }
  ActKind kind() const override { return ActKind::PropTau; }
  std::string name() const override { return "prop_tau(" + spec.name + ")"; }

 private:
  double inf_tau_;
};

struct FromSignatureImpl final : Activation::Impl {
  Signature sig;
  double k, kp;
  FromSignatureImpl(Signature s, double k_, double kp_) : sig(std::move(s)), k(k_), kp(kp_) {}
  double eval(double z) const override { return k + kp * exp_chi(sig, z); }
  double derivative(double z) const override { return kp * sig(exp_chi(sig, z)); }
  std::optional<double> inverse(double v) const override {
    const double h = (v - k) / kp;
    if (!(h > 0.0)) return std::nullopt;
    return log_chi(sig, h);
  }
  double domain_lo() const override { return log_chi_inf(sig); }
  double inf_value() const override { return k; }
  std::optional<Signature> table_chi() const override { return scaled(sig, 1.0 / kp); }
  ActKind kind() const override { return ActKind::FromSignature; }
  std::string name() const override {
    return "from_signature(" + sig.name() + "," + num_str(k) + "," + num_str(kp) + ")";
  }
};

struct LinearImpl final : Activation::Impl {
  double eval(double z) const override { return z; }
  double derivative(double) const override { return 1.0; }
  std::optional<double> inverse(double v) const override { return v; }
  double inf_value() const override { return -kInf; }
  ActKind kind() const override { return ActKind::Linear; }
  std::string name() const override { return "linear"; }
};

// Solves v(z) = target for z >= lo by bracket expansion and bisection.
double solve_increasing(const Activation::Impl& act, double target, double lo_bound) {
  double lo = std::isfinite(lo_bound) ? lo_bound : -1.0;
  double hi = std::max(lo + 1.0, 1.0);
  if (!std::isfinite(lo_bound)) {
    while (act.eval(lo) >= target) {
      lo *= 2.0;
      if (lo < -1e300) throw NotInvertible("activation value below its range");
    }
  }
  while (act.eval(hi) < target) {
    hi = hi * 2.0 + 1.0;
    if (hi > 1e300) throw NotInvertible("activation value above its range");
  }
  return num::bisect_first([&](double z) { return act.eval(z) >= target; }, lo, hi, 1e-16);
}

// chi(y) = v'(h^{-1}(y)) / s with h = (v - inf v) / s.
struct ExtractedImpl final : Signature::Impl {
  Activation act;
  double inf_v, s, lo, z1;
  ExtractedImpl(Activation a, bool normalized)
      : act(std::move(a)), inf_v(act.inf_value()), lo(act.admissible_lo()) {
    s = normalized ? act(0.0) - inf_v : 1.0;
    z1 = hinv(1.0);
  }
  double h(double z) const { return (act.impl().eval(z) - inf_v) / s; }
  double hinv(double y) const { return solve_increasing(act.impl(), inf_v + s * y, lo); }
  double eval(double y) const override {
    if (y <= 0.0) return 0.0;
    return act.impl().derivative(hinv(y)) / s;
  }
  std::optional<double> log(double y) const override { return hinv(y) - z1; }
  std::optional<double> exp(double t) const override {
    const double z = t + z1;
    if (z < lo) return 0.0;
    return h(z);
  }
  double log_inf() const override { return std::isfinite(lo) ? lo - z1 : -kInf; }
  SigKind kind() const override { return SigKind::FromActivation; }
  std::string name() const override { return "extracted(" + act.name() + ")"; }
};

}  // namespace

std::optional<double> Activation::Impl::inverse(double v) const {
  if (v <= inf_value()) return std::nullopt;
  try {
    return solve_increasing(*this, v, admissible_lo());
  } catch (const NotInvertible&) {
    return std::nullopt;
  }
}

double Activation::operator()(double z) const {
  if (z < impl_->domain_lo() || std::isnan(z))
    throw DomainError(name() + " evaluated outside its domain");
  return impl_->eval(z);
}

double Activation::derivative(double z) const {
  if (z < impl_->domain_lo() || std::isnan(z))
    throw DomainError(name() + " differentiated outside its domain");
  return impl_->derivative(z);
}

double Activation::inverse(double v) const {
  auto z = impl_->inverse(v);
  if (!z) throw NotInvertible(name() + " is not invertible at " + num_str(v));
  return *z;
}

Activation Activation::relu() { return Activation(std::make_shared<ReluImpl>()); }

Activation Activation::leaky_relu(double eps, double delta) {
  if (!(eps > 0.0 && eps <= 1.0) || !(delta <= 0.0))
    throw DomainError("leaky relu needs 0 < eps <= 1 and delta <= 0");
  return Activation(std::make_shared<LeakyReluImpl>(eps, delta));
}

Activation Activation::elu(double alpha, double beta) {
  if (!(alpha > 0.0 && beta >= alpha)) throw DomainError("elu needs beta >= alpha > 0");
  return Activation(std::make_shared<EluImpl>(alpha, beta));
}

Activation Activation::mu_relu(double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) throw DomainError("mu-relu needs mu in [0,1)");
  return Activation(std::make_shared<MuReluImpl>(mu));
}

Activation Activation::softplus() { return Activation(std::make_shared<SoftplusImpl>()); }
Activation Activation::lsu() { return Activation(std::make_shared<LsuImpl>()); }
Activation Activation::linear() { return Activation(std::make_shared<LinearImpl>()); }

Activation Activation::prop_tau(PropTauSpec spec) {
  if (!spec.tau_star || !spec.tau_star_prime) throw DomainError("prop-tau needs tau* and tau*'");
  if (!(spec.tau_star(0.0) > 0.0)) throw DomainError("prop-tau needs tau*(0) > 0");
  const double lo = spec.flat_below;
  const double inf_tau = spec.tau_star(std::isfinite(lo) ? lo : -1e9);
  return Activation(std::make_shared<PropTauImpl>(std::move(spec), inf_tau, lo));
}

double eval_activation(const Activation& act, double z) { return act(z); }

Activation activation_from_signature(const Signature& sig, double k, double kp) {
  if (!(kp > 0.0)) throw DomainError("activation_from_signature needs k' > 0");
  return Activation(std::make_shared<FromSignatureImpl>(sig, k, kp));
}

AdmissibilityReport check_admissibility(const Activation& act) {
  AdmissibilityReport rep{true, {}, std::nullopt};
  const double lo = std::max(-50.0, act.admissible_lo());
  const double hi = 50.0;
  const int n = 10001;
  std::vector<double> z(n), v(n);
  for (int i = 0; i < n; ++i) {
    z[i] = lo + (hi - lo) * i / (n - 1);
    v[i] = act(z[i]);
  }
  const auto& impl = act.impl();

  // C1: a derivative jump that survives repeated halving of its interval is a kink.
  double c1_witness = NAN;
  for (int i = 0; i + 1 < n && std::isnan(c1_witness); ++i) {
    double a = z[i], b = z[i + 1];
    const double jump0 = std::fabs(impl.derivative(b) - impl.derivative(a));
    if (jump0 <= 1e-3) continue;
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      const double dm = impl.derivative(m);
      if (std::fabs(dm - impl.derivative(a)) >= std::fabs(impl.derivative(b) - dm))
        b = m;
      else
        a = m;
    }
    if (std::fabs(impl.derivative(b) - impl.derivative(a)) > 0.5 * jump0) c1_witness = 0.5 * (a + b);
  }
  rep.checks.push_back({"C1", std::isnan(c1_witness), std::isnan(c1_witness) ? lo : c1_witness});

  // Lower bounded: trivially on a closed lower-bounded domain, else the left tail must settle.
  bool lower = true;
  double lower_witness = lo;
  if (!std::isfinite(act.admissible_lo())) {
    double prev_v = impl.eval(-1e2), prev_inc = kInf;
    for (double t = -1e3; t >= -1e8; t *= 10.0) {
      const double cur = impl.eval(t);
      const double inc = prev_v - cur;
      if (!std::isfinite(cur) || inc > prev_inc * 1.0001 + 1e-300) {
        lower = false;
        lower_witness = t;
        break;
      }
      prev_v = cur;
      prev_inc = inc;
      lower_witness = t;
    }
    if (lower && prev_inc > 1e-3 * (1.0 + std::fabs(impl.eval(-1e2)))) lower = false;
  }
  rep.checks.push_back({"lower_bounded", lower, lower_witness});

  // Strictly increasing: successive values increase, or v' > 0 in between where values underflow.
  double inc_witness = NAN;
  for (int i = 0; i + 1 < n; ++i) {
    if (v[i + 1] > v[i]) continue;
    if (impl.derivative(0.5 * (z[i] + z[i + 1])) > 0.0) continue;
    inc_witness = z[i];
    break;
  }
  rep.checks.push_back({"strictly_increasing", std::isnan(inc_witness),
                        std::isnan(inc_witness) ? lo : inc_witness});

  double cvx_witness = NAN;
  for (int i = 1; i + 1 < n; ++i) {
    const double d2 = v[i + 1] - 2.0 * v[i] + v[i - 1];
    if (d2 < -1e-8 * std::max(1.0, std::fabs(v[i]))) {
      cvx_witness = z[i];
      break;
    }
  }
  rep.checks.push_back({"convex", std::isnan(cvx_witness), std::isnan(cvx_witness) ? lo : cvx_witness});

  rep.checks.push_back({"domain_meets_nonnegatives", act.domain_lo() <= 0.0 || hi >= act.domain_lo(),
                        std::max(0.0, act.domain_lo())});

  for (const auto& c : rep.checks) rep.strong = rep.strong && c.pass;
  if (act.kind() == ActKind::ReLU) rep.weak_approx_l1 = weak_l1_bound(0.99).numeric;
  return rep;
}

Signature extract_signature(const Activation& act, bool normalized) {
  return Signature(std::make_shared<ExtractedImpl>(act, normalized));
}

Signature signature_from_activation(const Activation& act, bool normalized) {
  if (!check_admissibility(act).strong)
    throw NotStronglyAdmissible(act.name() + " is not strongly admissible");
  auto table = act.table_chi();
  if (!table) return extract_signature(act, normalized);
  if (!normalized) return *table;
  return scaled(*table, act(0.0) - act.inf_value());
}

SignatureForm signature_form(const Activation& act) {
  switch (act.kind()) {
    case ActKind::ReLU:
    case ActKind::LeakyReLU:
    case ActKind::Linear:
      throw NotStronglyAdmissible(act.name() + " has no signature form");
    case ActKind::FromSignature: {
      const auto& fs = static_cast<const FromSignatureImpl&>(act.impl());
      return {fs.sig, fs.k, fs.kp};
    }
    default:
      break;
  }
  const double k = act.inf_value();
  const double kp = act(0.0) - k;
  if (auto table = act.table_chi()) return {scaled(*table, kp), k, kp};
  return {extract_signature(act, true), k, kp};
}

double table1_leaky_chi(double z, double eps, double delta) {
  return z > -delta ? 1.0 : 1.0 / eps;
}

WeakL1 weak_l1_bound(double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) throw DomainError("mu must lie in [0,1)");
  const double c = 1.0 - mu;
  // |c log(1 + e^{z/c}) - max(0, z)| = c log1p(e^{-|z|/c})
  auto gap = [c](double z) { return c * std::log1p(std::exp(-std::fabs(z) / c)); };
  const double numeric = num::simpson(gap, -60.0, 0.0, 1e-13) + num::simpson(gap, 0.0, 60.0, 1e-13);
  return {c * kPi * kPi / 3.0, numeric};
}

double mu_relu_sup_gap(double mu, double lo, double hi, int n) {
  auto act = Activation::mu_relu(mu);
  // measured on the k = 0 form
  const double shift = 0.5 * (1.0 - mu);
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = lo + (hi - lo) * i / (n - 1);
    best = std::max(best, std::fabs(act(z) + shift - std::max(0.0, z)));
  }
  return best;
}

PropTauSpec softplus_tau() {
  return {"softplus",
          [](double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); },
          [](double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); },
          [](double t) { return std::log(std::expm1(t)); }};
}

PropTauSpec mu_relu_tau(double mu) {
  const double c = 1.0 - mu;
  return {"mu_relu(" + num_str(mu) + ")",
          [c](double z) {
            const double r = std::hypot(c, z);
            return 0.5 * (z >= 0.0 ? z + r : c * c / (r - z));
          },
          [c](double z) {
            const double r = std::hypot(c, z);
            return z >= 0.0 ? 0.5 * (1.0 + z / r) : 0.5 * c * c / (r * (r - z));
          },
          [c](double t) { return t - c * c / (4.0 * t); }};
}

PropTauSpec lsu_tau() {
  return {"lsu",
          [](double z) { return z < -1.0 ? 0.0 : (z <= 1.0 ? (1.0 + z) * (1.0 + z) : 4.0 * z); },
          [](double z) { return z < -1.0 ? 0.0 : (z <= 1.0 ? 2.0 * (1.0 + z) : 4.0); },
          [](double t) { return t <= 4.0 ? std::sqrt(t) - 1.0 : t / 4.0; },
          -1.0};
}

}  // namespace vig
