#include "vigfgan/vig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"

namespace vig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kPi = std::acos(-1.0);

double discriminator_value(const Signature& sig, double Z, double p, double q) {
  const double fl = num::kDensityFloor;
  if (p <= fl) {
    if (q > fl) throw DomainError("optimal discriminator undefined: P vanishes where Q does not");
    return -1.0 / Z;
  }
  const double cp = sig(p);
  if (!(cp > 0.0)) throw DomainError("chi(P) underflows where P > 0");
  return -sig(q) / (Z * cp);
}

}  // namespace

VigProblem make_vig_problem(const GridFn& P, const GridFn& Q, const Signature& sig) {
  if (P.dom.n != Q.dom.n || P.dom.a != Q.dom.a || P.dom.b != Q.dom.b)
    throw DomainError("P and Q live on different domains");
  auto e = escort_of(Q, sig);
  const double Z = e.Z;
  return {P, Q, sig, std::move(e), Z};
}

double optimal_discriminator(const VigProblem& prob, double x) {
  return discriminator_value(prob.sig, prob.Z, prob.P.at(x), prob.Q.at(x));
}

GridFn optimal_discriminator_grid(const VigProblem& prob) {
  GridFn T(prob.P.dom);
  for (int i = 0; i < T.size(); ++i) T[i] = discriminator_value(prob.sig, prob.Z, prob.P[i], prob.Q[i]);
  return T;
}

double conjugate_neg_log_chi(const Signature& sig, double q, double t) {
  if (!(q > 0.0)) throw DomainError("conjugate needs q > 0");
  if (t > 0.0) throw Unbounded("conjugate of -log_chi is +inf for t > 0");
  if (t == 0.0) return log_chi_sup(sig) - log_chi(sig, q);
  const double z = sig.inverse(-q / t) / q;
  if (std::isinf(z)) return kInf;
  return t * z + log_chi(sig, q * z) - log_chi(sig, q);
}

namespace {

// int_1^b h^{-1}(u) du with h(t) = q / chi(q t), so h^{-1}(u) = chi^{-1}(q/u) / q; integrated in s = log u.
double inverse_h_integral(const Signature& sig, double q, double b) {
  auto g = [&](double s) {
    const double u = std::exp(s);
    return u * sig.inverse(q / u) / q;
  };
  return num::simpson(g, 0.0, std::log(b), 1e-12);
}

}  // namespace

double conjugate_k(const Signature& sig, double q) {
  if (!(q > 0.0)) throw DomainError("conjugate needs q > 0");
  const double h1 = q / sig(q);
  return -h1 + inverse_h_integral(sig, q, h1);
}

// -log_{(chi*)_{1/q}}(-t)
double conjugate_B(const Signature& sig, double q, double t) {
  if (!(q > 0.0)) throw DomainError("conjugate needs q > 0");
  if (t > 0.0) throw Unbounded("conjugate of -log_chi is +inf for t > 0");
  return -inverse_h_integral(sig, q, -t);
}

double variational_value(const VigProblem& prob, const GridFn& T) {
  const double fl = num::kDensityFloor;
  GridFn g(T.dom);
  for (int i = 0; i < g.size(); ++i) {
    if (T[i] > 0.0) throw ConjugateDomain("discriminator must be non-positive");
    const double p = prob.P[i], qt = prob.escortQ.density[i];
    double v = p > fl ? p * T[i] : 0.0;
    if (qt > fl) v -= qt * conjugate_neg_log_chi(prob.sig, qt, T[i]);
    g[i] = v;
  }
  return g.integrate();
}

double compute_K(const VigProblem& prob) {
  const auto& qt = prob.escortQ.density;
  return integrate(qt.dom, [&](double, int i) {
    return qt[i] > num::kDensityFloor ? qt[i] * conjugate_k(prob.sig, qt[i]) : 0.0;
  });
}

double variational_value_dual_form(const VigProblem& prob, const GridFn& T) {
  const double fl = num::kDensityFloor;
  GridFn g(T.dom);
  for (int i = 0; i < g.size(); ++i) {
    if (T[i] > 0.0) throw ConjugateDomain("discriminator must be non-positive");
    const double p = prob.P[i], qt = prob.escortQ.density[i];
    double v = p > fl ? p * T[i] : 0.0;
    if (qt > fl) v -= qt * conjugate_B(prob.sig, qt, T[i]);
    g[i] = v;
  }
  return g.integrate();
}

double penalty_J(const GridFn& Q, const Signature& sig) {
  auto e = escort_of(Q, sig);
  return kl_chi_scaled(sig, e.density, e.density, Q);
}

double escort_log_gap(const VigProblem& prob) {
  const auto& qt = prob.escortQ.density;
  const double fl = num::kDensityFloor;
  return integrate(qt.dom, [&](double, int i) {
    if (qt[i] <= fl) return 0.0;
    return qt[i] * (log_chi(prob.sig, std::max(prob.Q[i], fl)) - log_chi(prob.sig, std::max(prob.P[i], fl)));
  });
}

VigIdentityResult vig_identity_check(const Signature& sig, const Phi& phi, const std::vector<double>& theta_P,
                                     const std::vector<double>& theta_Q, const Domain1D& dom) {
  auto P = make_deformed(sig, phi, theta_P, dom).grid();
  auto Q = make_deformed(sig, phi, theta_Q, dom).grid();
  auto prob = make_vig_problem(P, Q, sig);
  VigIdentityResult r{};
  r.lhs = variational_value(prob, optimal_discriminator_grid(prob));
  r.bregman = bregman(cumulant_generator(sig, phi, dom), theta_P, theta_Q);
  r.J = penalty_J(Q, sig);
  r.rhs = r.bregman + r.J;
  r.gap = r.lhs - r.rhs;
  r.escort_form = escort_log_gap(prob);
  return r;
}

Signature PenaltySpec::signature() const {
  switch (kind) {
    case BoundKind::GanThm10i: return Signature::gan();
    case BoundKind::MuReluThm10ii: return Signature::mu_relu_chi(param);
    case BoundKind::EluThm10iii: return Signature::elu_chi(param, param);
    case BoundKind::PowerQLemma: return Signature::power_q(param);
    case BoundKind::HalfGaussianExact: return Signature::power_q(0.5);
  }
  throw DomainError("unknown bound kind");
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::GanThm10i: return "gan";
    case BoundKind::MuReluThm10ii: return "mu_relu";
    case BoundKind::EluThm10iii: return "elu";
    case BoundKind::PowerQLemma: return "power_q";
    case BoundKind::HalfGaussianExact: return "half_gaussian";
  }
  return "?";
}

double grid_measure_below(const GridFn& Q, double level) {
  int count = 0;
  for (int i = 0; i < Q.size(); ++i) count += Q[i] < level;
  return Q.dom.dx() * count;
}

double h_star(const GridFn& Q) {
  return integrate(Q.dom, [&](double, int i) {
    return Q[i] > num::kDensityFloor ? Q[i] * std::max(0.0, -std::log(Q[i])) : 0.0;
  });
}

double half_gaussian_penalty_closed_form(double sigma) {
  return std::pow(3.0, 1.5) / (2.0 * std::sqrt(sigma)) *
         (3.0 * kPi / 16.0 - 1.0 / std::sqrt(15.0 * std::sqrt(2.0)));
}

PenaltyReport penalty_bound(const GridFn& Q, const PenaltySpec& spec) {
  const auto sig = spec.signature();
  auto e = escort_of(Q, sig);
  PenaltyReport r{};
  r.bound_kind = spec.kind;
  r.Z = e.Z;
  r.J = kl_chi_scaled(sig, e.density, e.density, Q);
  const double Z = r.Z;
  switch (spec.kind) {
    case BoundKind::GanThm10i: {
      const double level = Z > 1.0 ? 1.0 / (Z - 1.0) : kInf;
      r.measure_small = grid_measure_below(Q, level);
      r.bound = *r.measure_small / Z;
      break;
    }
    case BoundKind::MuReluThm10ii: {
      const double L = 1.0 / (1.0 - spec.param);
      r.bound = (1.0 + L / Z) / Z;
      break;
    }
    case BoundKind::EluThm10iii: {
      r.H_star = h_star(Q);
      r.bound = std::log(spec.param) / Z + (1.0 - Z) / (Z * Z) + *r.H_star / Z;
      break;
    }
    case BoundKind::PowerQLemma:
      if (!(spec.param > 1.0)) throw DomainError("the power-q penalty bound needs q > 1");
      r.bound = 1.0 / ((spec.param - 1.0) * Z);
      break;
    case BoundKind::HalfGaussianExact:
      r.bound = half_gaussian_penalty_closed_form(spec.param);
      break;
  }
  r.holds = r.J <= r.bound + 1e-9;
  return r;
}

}  // namespace vig
