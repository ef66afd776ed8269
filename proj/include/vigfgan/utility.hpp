#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vigfgan/chi.hpp"
#include "vigfgan/family.hpp"
#include "vigfgan/vig.hpp"

namespace vig {

// u(z) = log_{(chi*)_{1/q}}(z) = int_1^z chi^{-1}(q/t)/q dt for the belief density value q.
struct UtilitySpec {
  Signature sig;
  double q;
  std::function<double(double)> eval;
  std::function<double(double)> d1;  // chi^{-1}(q/z)/q
  std::function<double(double)> d2;  // -(chi^{-1})'(q/z)/z^2
};

UtilitySpec make_utility(const Signature& sig, double q);

// DomainError for z <= 0.
double utility(const UtilitySpec& u, double z);

// (chi^{-1})'(y): 1/chi'(chi^{-1}(y)) when chi' is exact, otherwise central differences.
double chi_inverse_derivative(const Signature& sig, double y);

// g(y) = y (chi^{-1})'(y) / chi^{-1}(y)
double risk_g(const Signature& sig, double y);

// -u''/u'; DegenerateUtility when u' vanishes or is infinite.
double absolute_risk_aversion(const UtilitySpec& u, double z);
// z a(z) = g(q/z).
double relative_risk_aversion(const UtilitySpec& u, double z);
// Alternative form g(z/q), kept for comparison.
double relative_risk_aversion_printed(const UtilitySpec& u, double z);

// Relative risk aversion at the optimum Upsilon* = -T*: g(chi(P(x))). DomainError if P(x) is below the floor.
double risk_at_optimum(const Signature& sig, double p);
// Printed closed form g(1/chi(P(x))).
double risk_at_optimum_printed(const Signature& sig, double p);
// z a(z) evaluated at z = Upsilon*(x) with q = Qtilde(x), straight from the game.
double risk_at_optimum_from_game(const VigProblem& prob, int node);

// E_P[-Upsilon] + E_Qtilde[u_{Qtilde(x)}(Upsilon)] for Upsilon > 0 on the grid.
double dm_objective(const VigProblem& prob, const GridFn& Upsilon);

// CSV rows sig,q,z,a,r over the z grid.
std::string risk_table_csv(const Signature& sig, double q, const std::vector<double>& zs);

}  // namespace vig
