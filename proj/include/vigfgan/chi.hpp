#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vig {

enum class SigKind {
  Identity,
  PowerQ,
  Gan,
  FromActivation,
  LeakyChi,
  Piecewise,
  Table,  // closed-form signatures of the activation catalogue
  KInfty,
  Scaled,
  Dual,
  Damped,
  Custom
};

// A non-decreasing map chi: R+ -> R+ generating log_chi / exp_chi.
class Signature {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual double eval(double z) const = 0;
    // Generalized inverse: left endpoint of {z : chi(z) >= y}; +inf past sup chi.
    virtual double inverse(double y) const;
    virtual std::optional<double> derivative(double) const { return std::nullopt; }
    virtual std::optional<double> log(double) const { return std::nullopt; }
    virtual std::optional<double> exp(double) const { return std::nullopt; }
    // Bounds of the image of log_chi when known in closed form.
    virtual double log_inf() const { return -std::numeric_limits<double>::infinity(); }
    virtual double log_sup() const { return std::numeric_limits<double>::infinity(); }
    virtual SigKind kind() const = 0;
    virtual std::string name() const = 0;
  };

  explicit Signature(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  double operator()(double z) const { return impl_->eval(z); }
  double eval(double z) const { return impl_->eval(z); }
  double inverse(double y) const { return impl_->inverse(y); }
  // Analytic when available, otherwise central differences.
  double derivative(double z) const;
  bool has_exact_derivative() const;
  SigKind kind() const { return impl_->kind(); }
  std::string name() const { return impl_->name(); }
  const Impl& impl() const { return *impl_; }

  static Signature identity();
  static Signature power_q(double q);
  static Signature gan();
  static Signature leaky(const Signature& base, double delta, double eps);
  // Linear interpolation through (z, chi) knots; first knot must sit at z = 0.
  static Signature piecewise(std::vector<std::pair<double, double>> knots);
  // Blow-up signature: z below eps, eps + (K^(z-eps) - 1)/log K above.
  static Signature k_infinity(double K, double eps);
  static Signature custom(std::string name, std::function<double(double)> eval,
                          std::function<double(double)> inverse = {},
                          std::function<double(double)> derivative = {});

  // Closed forms of the activation catalogue.
  static Signature softplus_chi();
  static Signature mu_relu_chi(double mu);
  static Signature elu_chi(double alpha, double beta);
  static Signature lsu_chi();

 private:
  std::shared_ptr<const Impl> impl_;
};

// log_chi(z) = int_1^z dt / chi(t).
double log_chi(const Signature& sig, double z);
// Inverse of log_chi. Above the image returns +inf; below it throws DomainError.
double exp_chi(const Signature& sig, double y);
// Same as exp_chi but maps arguments below the image to 0 (compact-support convention).
double exp_chi_clamped(const Signature& sig, double y);

double log_chi_inf(const Signature& sig);
double log_chi_sup(const Signature& sig);

// chi_p(t) = chi(t p) / p
Signature scaled(const Signature& sig, double p);
// chi*(t) = 1 / chi^{-1}(1 / t)
Signature dual_signature(const Signature& sig);
// chi / (1 + k chi)
Signature damped(const Signature& sig, double k);
// eps z below delta, eps delta + chi(z - delta) above.
Signature leaky_chi(const Signature& base, double delta, double eps);

bool is_nondecreasing(const Signature& sig, double lo, double hi, int n = 1000);

}  // namespace vig
