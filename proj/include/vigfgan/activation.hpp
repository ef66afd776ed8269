#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vigfgan/chi.hpp"

namespace vig {

enum class ActKind { ReLU, LeakyReLU, ELU, MuReLU, Softplus, LSU, PropTau, FromSignature, Linear };

// Representation v(z) = k + k' exp_chi(z), i.e. v'(z) = k' chi(exp_chi(z)).
struct SignatureForm {
  Signature chi;
  double k;
  double kp;
};

// tau* and its derivative; v(z) = k + tau*(z)/tau*(0) with k chosen so v(0) = 0.
struct PropTauSpec {
  std::string name;
  std::function<double(double)> tau_star;
  std::function<double(double)> tau_star_prime;
  std::function<double(double)> tau_star_inverse;  // optional
  double flat_below = -std::numeric_limits<double>::infinity();
};

class Activation {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual double eval(double z) const = 0;
    virtual double derivative(double z) const = 0;
    // Inverse on the strictly increasing part; nullopt where v is not invertible.
    virtual std::optional<double> inverse(double v) const;
    virtual double domain_lo() const { return -std::numeric_limits<double>::infinity(); }
    // Left end of the region where admissibility is assessed (LSU is flat below -1).
    virtual double admissible_lo() const { return domain_lo(); }
    virtual double inf_value() const = 0;
    // Table-1 chi (unnormalized h = v - inf v) when catalogued.
    virtual std::optional<Signature> table_chi() const { return std::nullopt; }
    virtual ActKind kind() const = 0;
    virtual std::string name() const = 0;
  };

  explicit Activation(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  // Throws DomainError outside dom(v).
  double operator()(double z) const;
  double eval(double z) const { return (*this)(z); }
  double derivative(double z) const;
  // Throws NotInvertible where v^{-1} is undefined.
  double inverse(double v) const;
  double domain_lo() const { return impl_->domain_lo(); }
  double admissible_lo() const { return impl_->admissible_lo(); }
  double inf_value() const { return impl_->inf_value(); }
  std::optional<Signature> table_chi() const { return impl_->table_chi(); }
  ActKind kind() const { return impl_->kind(); }
  std::string name() const { return impl_->name(); }
  const Impl& impl() const { return *impl_; }

  static Activation relu();
  static Activation leaky_relu(double eps, double delta);
  static Activation elu(double alpha, double beta);
  static Activation mu_relu(double mu);
  static Activation softplus();
  static Activation lsu();
  static Activation prop_tau(PropTauSpec spec);
  static Activation linear();

 private:
  std::shared_ptr<const Impl> impl_;
};

struct AdmissibilityCheck {
  std::string criterion;
  bool pass;
  double witness;
};

struct AdmissibilityReport {
  bool strong;
  std::vector<AdmissibilityCheck> checks;
  std::optional<double> weak_approx_l1;
};

struct WeakL1 {
  double bound;    // (1 - mu) pi^2 / 3
  double numeric;  // quadrature of |v_mu - ReLU| on [-60, 60]
};

double eval_activation(const Activation& act, double z);
AdmissibilityReport check_admissibility(const Activation& act);

// v(z) = k + k' exp_chi(z)
Activation activation_from_signature(const Signature& sig, double k, double kp);

// chi of h = v - inf v (the Table-1 convention); normalized=true divides h by v(0) - inf v.
// Catalogued kinds return their closed form, others go through extract_signature.
Signature signature_from_activation(const Activation& act, bool normalized = false);
// Always numeric: chi(y) = v'(h^{-1}(y)) with h^{-1} by bisection.
Signature extract_signature(const Activation& act, bool normalized = false);

// (chi_n, k, k') with v = k + k' exp_{chi_n}, chi_n normalized so that exp_{chi_n}(0) = 1 at z = 0.
SignatureForm signature_form(const Activation& act);

// Leaky-ReLU chi column as printed in Table 1.
double table1_leaky_chi(double z, double eps, double delta);

WeakL1 weak_l1_bound(double mu);

// sup_z |mu-ReLU(z) - ReLU(z)| over a grid on [lo, hi].
double mu_relu_sup_gap(double mu, double lo = -100.0, double hi = 100.0, int n = 200001);

PropTauSpec softplus_tau();
PropTauSpec mu_relu_tau(double mu);
PropTauSpec lsu_tau();

}  // namespace vig
