#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vigfgan/chi.hpp"
#include "vigfgan/divergence.hpp"
#include "vigfgan/family.hpp"

namespace vig {

// Target P, model Q and the chi-escort of Q.
struct VigProblem {
  GridFn P;
  GridFn Q;
  Signature sig;
  Escort escortQ;
  double Z;
};

VigProblem make_vig_problem(const GridFn& P, const GridFn& Q, const Signature& sig);

// T*(x) = -(1/Z) chi(Q(x)) / chi(P(x)); DomainError where P vanishes but Q does not.
double optimal_discriminator(const VigProblem& prob, double x);
GridFn optimal_discriminator_grid(const VigProblem& prob);

// E_P[T] - E_Qtilde[(-log_{chi_Qtilde})*(T)]; ConjugateDomain if T > 0 somewhere.
double variational_value(const VigProblem& prob, const GridFn& T);

// (-log_{chi_q})*(t) = sup_{z > 0} {t z + log_{chi_q}(z)}, attained at chi(q z) = -q/t.
double conjugate_neg_log_chi(const Signature& sig, double q, double t);
// Split of the conjugate into k(q) + B(t), B(t) = -log_{(chi*)_{1/q}}(-t).
double conjugate_k(const Signature& sig, double q);
double conjugate_B(const Signature& sig, double q, double t);

// E_Qtilde[k(Qtilde)]
double compute_K(const VigProblem& prob);
// E_P[T] - E_Qtilde[B_Qtilde(T)]; equals variational_value + K.
double variational_value_dual_form(const VigProblem& prob, const GridFn& T);

// J(Q) = KL_{chi_Qtilde}(Qtilde || Q)
double penalty_J(const GridFn& Q, const Signature& sig);
// E_Qtilde[log_chi Q - log_chi P]
double escort_log_gap(const VigProblem& prob);

struct VigIdentityResult {
  double lhs;       // variational value at T*
  double rhs;       // Bregman + J
  double gap;
  double bregman;   // D_C(theta_P || theta_Q)
  double J;
  double escort_form;  // E_Qtilde[log_chi Q - log_chi P]
};
VigIdentityResult vig_identity_check(const Signature& sig, const Phi& phi, const std::vector<double>& theta_P,
                                     const std::vector<double>& theta_Q, const Domain1D& dom);

enum class BoundKind { GanThm10i, MuReluThm10ii, EluThm10iii, PowerQLemma, HalfGaussianExact };

struct PenaltySpec {
  BoundKind kind;
  double param = 0.0;  // mu, gamma, q or sigma depending on kind

  static PenaltySpec gan() { return {BoundKind::GanThm10i, 0.0}; }
  static PenaltySpec mu_relu(double mu) { return {BoundKind::MuReluThm10ii, mu}; }
  static PenaltySpec elu(double gamma) { return {BoundKind::EluThm10iii, gamma}; }
  static PenaltySpec power_q(double q) { return {BoundKind::PowerQLemma, q}; }
  static PenaltySpec half_gaussian(double sigma) { return {BoundKind::HalfGaussianExact, sigma}; }
  Signature signature() const;
};

struct PenaltyReport {
  double J;
  double Z;
  double bound;
  BoundKind bound_kind;
  bool holds;
  std::optional<double> H_star;
  std::optional<double> measure_small;
};

PenaltyReport penalty_bound(const GridFn& Q, const PenaltySpec& spec);

std::string to_string(BoundKind k);

// m(Q < level): grid measure of the nodes where Q is below level.
double grid_measure_below(const GridFn& Q, double level);
// E_Q[max(0, -log Q)]
double h_star(const GridFn& Q);
// 3^{3/2} / (2 sqrt(sigma)) * (3 pi / 16 - 1 / sqrt(15 sqrt 2))
double half_gaussian_penalty_closed_form(double sigma);

}  // namespace vig
