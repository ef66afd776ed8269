#include "vigfgan/utility.hpp"

#include <cmath>
#include <sstream>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"

namespace vig {

double chi_inverse_derivative(const Signature& sig, double y) {
  if (sig.has_exact_derivative()) {
    const double t = sig.inverse(y);
    const double d = sig.derivative(t);
    if (!(d > 0.0)) throw DegenerateUtility("chi is flat at the inverse point");
    return 1.0 / d;
  }
  const double h = 1e-5 * y;
  return (sig.inverse(y + h) - sig.inverse(y - h)) / (2.0 * h);
}

double risk_g(const Signature& sig, double y) {
  const double inv = sig.inverse(y);
  if (!(inv > 0.0) || std::isinf(inv)) throw DegenerateUtility("chi^{-1} is zero or infinite");
  return y * chi_inverse_derivative(sig, y) / inv;
}

UtilitySpec make_utility(const Signature& sig, double q) {
  if (!(q > 0.0)) throw DomainError("utility needs a positive belief density");
  UtilitySpec u{sig, q, {}, {}, {}};
  u.eval = [sig, q](double z) { return -conjugate_B(sig, q, -z); };
  u.d1 = [sig, q](double z) { return sig.inverse(q / z) / q; };
  u.d2 = [sig, q](double z) { return -chi_inverse_derivative(sig, q / z) / (z * z); };
  return u;
}

namespace {

void require_positive(double z) {
  if (!(z > 0.0)) throw DomainError("utility is defined for z > 0");
}

}  // namespace

double utility(const UtilitySpec& u, double z) {
  require_positive(z);
  return u.eval(z);
}

double absolute_risk_aversion(const UtilitySpec& u, double z) {
  require_positive(z);
  const double d1 = u.d1(z);
  if (!(d1 > 1e-300) || std::isinf(d1)) throw DegenerateUtility("marginal utility vanishes or is infinite");
  return -u.d2(z) / d1;
}

double relative_risk_aversion(const UtilitySpec& u, double z) {
  require_positive(z);
  return risk_g(u.sig, u.q / z);
}

double relative_risk_aversion_printed(const UtilitySpec& u, double z) {
  require_positive(z);
  return risk_g(u.sig, z / u.q);
}

double risk_at_optimum(const Signature& sig, double p) {
  if (!(p > num::kDensityFloor)) throw DomainError("P(x) must be positive");
  return risk_g(sig, sig(p));
}

double risk_at_optimum_printed(const Signature& sig, double p) {
  if (!(p > num::kDensityFloor)) throw DomainError("P(x) must be positive");
  return risk_g(sig, 1.0 / sig(p));
}

double risk_at_optimum_from_game(const VigProblem& prob, int node) {
  if (!(prob.P[node] > num::kDensityFloor)) throw DomainError("P(x) must be positive");
  const double ups = -optimal_discriminator_grid(prob)[node];
  const auto u = make_utility(prob.sig, prob.escortQ.density[node]);
  return ups * absolute_risk_aversion(u, ups);
}

double dm_objective(const VigProblem& prob, const GridFn& Upsilon) {
  const double fl = num::kDensityFloor;
  return integrate(Upsilon.dom, [&](double, int i) {
    if (!(Upsilon[i] > 0.0)) throw DomainError("portfolio must be positive");
    const double p = prob.P[i], qt = prob.escortQ.density[i];
    double v = p > fl ? -p * Upsilon[i] : 0.0;
    if (qt > fl) v += qt * utility(make_utility(prob.sig, qt), Upsilon[i]);
    return v;
  });
}

std::string risk_table_csv(const Signature& sig, double q, const std::vector<double>& zs) {
  std::ostringstream os;
  os.precision(12);
  os << "sig,q,z,a,r\n";
  const auto u = make_utility(sig, q);
  for (double z : zs) os << sig.name() << ',' << q << ',' << z << ',' << absolute_risk_aversion(u, z) << ','
                         << relative_risk_aversion(u, z) << '\n';
  return os.str();
}

}  // namespace vig
