#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vigfgan/chi.hpp"
#include "vigfgan/family.hpp"

namespace vig {

// Convex generator f with f(1) = 0, its subgradient xi = f', and Legendre conjugate f*.
struct DivergenceSpec {
  std::string name;
  std::function<double(double)> f;        // defined on [0, inf), f(0) as a limit
  std::function<double(double)> xi;       // f' on (0, inf)
  std::function<double(double)> conj;     // f*(t); +inf outside its domain
  std::function<double(double)> xi_inv;   // (f')^{-1}, empty when not closed-form
  double slope_inf;                       // lim_{z->inf} f(z)/z

  double csiszar(double z) const { return z * f(1.0 / z); }
};

namespace divergences {
DivergenceSpec kl();
DivergenceSpec reverse_kl();
DivergenceSpec gan();
DivergenceSpec pearson();
DivergenceSpec neyman();
DivergenceSpec jensen_shannon();
// f = -log_chi
DivergenceSpec from_signature(const Signature& sig);
DivergenceSpec csiszar_dual(const DivergenceSpec& spec);
// f + k (z - 1)
DivergenceSpec affine(const DivergenceSpec& spec, double k);
// Throws DomainError for unknown names.
DivergenceSpec by_name(const std::string& name);
}  // namespace divergences

// sup_z {z t - f(z)} by golden-section search in log z (oracle for closed forms).
double numeric_conjugate(const DivergenceSpec& spec, double t);

// E_Q[f(P/Q)]
double f_divergence(const DivergenceSpec& spec, const GridFn& P, const GridFn& Q);
// E_P[-log_chi(Q/P)]
double kl_chi(const Signature& sig, const GridFn& P, const GridFn& Q);
// E_P[-log_{chi_{w(x)}}(Q/P)]
double kl_chi_scaled(const Signature& sig, const GridFn& weight, const GridFn& P, const GridFn& Q);

// Pointwise integrands, shared with the variational code.
double f_term(const DivergenceSpec& spec, double p, double q);
double kl_chi_term(const Signature& sig, double p, double q);

// chi(t) = 1 / (M + eps - xi(t)); SubgradientUnbounded if xi exceeds M on the probe grid.
Signature chi_from_f(const DivergenceSpec& spec, double M, double eps);

struct TruncatedChi {
  Signature sig;
  double remainder_bound;  // f(M) - f(t*)
};
// chi(t) = 1/(xi(t*) + eps - xi(t)) below t*, 1/eps above; M is the sup of the density ratio.
TruncatedChi chi_from_f_truncated(const DivergenceSpec& spec, double t_star, double eps, double M);

struct BregmanGenerator {
  std::function<double(const std::vector<double>&)> varphi;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

double bregman(const BregmanGenerator& gen, const std::vector<double>& theta,
               const std::vector<double>& rho);
BregmanGenerator half_squared_norm();

// Cumulant C(theta) of a chi-family (log-int-exp for the identity) with central-difference gradient.
double cumulant(const Signature& sig, const Phi& phi, const std::vector<double>& theta,
                const Domain1D& dom);
BregmanGenerator cumulant_generator(const Signature& sig, const Phi& phi, const Domain1D& dom,
                                    double step = 1e-5);

struct Theorem1Result {
  double kl;
  double bregman;
};
// KL(P || Q) against D_C(theta_Q || theta_P) for P, Q in the same exponential family.
Theorem1Result theorem1_check(const Phi& phi, const std::vector<double>& theta_p,
                              const std::vector<double>& theta_q, const Domain1D& dom);

struct GeneralizedTheorem1Result {
  double kl;
  double d_param;
  double d_cumulant;
};
GeneralizedTheorem1Result generalized_theorem1_check(const Phi& phi_p, const std::vector<double>& theta_p,
                                                     const Phi& phi_q, const std::vector<double>& theta_q,
                                                     const Domain1D& dom);

// max_k |KL_{chi/(1+k chi)}(P||Q) - KL_chi(P||Q)|
double lemma1_invariance_check(const Signature& sig, const std::vector<double>& ks, const GridFn& P,
                               const GridFn& Q);

}  // namespace vig
