#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vigfgan/activation.hpp"

namespace vig {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct DenseLayer {
  Mat W;
  Vec b;
};

// g(x) = v_out(Gamma phi_L(x) + beta), phi_l = v(W_l phi_{l-1} + b_l), phi_0 = x.
class GeneratorNet {
 public:
  // DomainError on shape mismatch or |det| <= 1e-8 for any W_l or Gamma.
  GeneratorNet(std::vector<DenseLayer> layers, Activation act, Mat Gamma, Vec beta,
               std::optional<Activation> v_out = std::nullopt);

  int dim() const { return d_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  const Activation& activation() const { return act_; }
  const Mat& Gamma() const { return Gamma_; }
  const Vec& beta() const { return beta_; }
  const std::optional<Activation>& v_out() const { return v_out_; }

  Vec forward(const Vec& x) const;
  // phi_0 .. phi_L
  std::vector<Vec> hidden(const Vec& x) const;
  // NotInvertible if v^{-1} or v_out^{-1} is undefined at some coordinate.
  Vec inverse(const Vec& z) const;
  // dg/dx^T from the layerwise products.
  Mat jacobian(const Vec& x) const;
  // Copy with the biases of layer l replaced.
  GeneratorNet with_bias(int layer, Vec b) const;

 private:
  int d_;
  std::vector<DenseLayer> layers_;
  Activation act_;
  Mat Gamma_;
  Vec beta_;
  std::optional<Activation> v_out_;
  std::vector<Eigen::PartialPivLU<Mat>> lu_;
  Eigen::PartialPivLU<Mat> lu_Gamma_;
};

// Input density on the box [lo, hi]^d (the box is also the quadrature domain).
struct InputDensity {
  int d;
  double lo, hi;
  std::function<double(const Vec&)> pdf;
};

InputDensity uniform_box(int d, double lo = -1.0, double hi = 1.0);
// Standard Gaussian restricted to [-bound, bound]^d, not renormalized.
InputDensity standard_gaussian(int d, double bound = 8.0);

// Central-difference Jacobian of the forward map.
Mat finite_difference_jacobian(const GeneratorNet& net, const Vec& x, double h = 1e-6);

// Q_in(g^{-1}(z)) / |det dg/dx^T|; SingularJacobian if the determinant vanishes.
double density_via_jacobian(const GeneratorNet& net, const InputDensity& in, const Vec& z);

// Tensor-product Simpson nodes over the input box; n odd nodes per axis.
struct BoxQuadrature {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};
BoxQuadrature box_quadrature(const InputDensity& in, int n_per_axis);
// Default node count per axis for d <= 3.
int default_nodes_per_axis(int d);

struct UnitEscort {
  int layer;
  int unit;
  double b;      // bias used
  double mass;   // int exp_chi(w^T phi + b) dmu
  double Z;      // int chi(exp_chi(w^T phi + b)) dmu
};

struct FactorizationResult {
  double q_g;
  double q_in;
  double q_deep;
  double h_out;
  double z_net;
  std::vector<UnitEscort> units;
};

// Solves every b_{l,i} layer by layer so that exp_chi(w^T phi_{l-1} + b) integrates to 1 over the box.
// DivergentNormalizer if no bias normalizes a unit.
GeneratorNet normalize_biases(const GeneratorNet& net, const InputDensity& in, int n_per_axis = 0);

// Escort statistics of every unit under the net's current biases.
std::vector<UnitEscort> unit_escorts(const GeneratorNet& net, const InputDensity& in, int n_per_axis = 0);

// Q_g(z) = Q_in(x) / (Qtilde_deep(x) H_out(x) Z_net), x = g^{-1}(z). DivergentNormalizer if some Z vanishes.
// normalized_escorts = false drops the Z_{l,i}: Qtilde_deep becomes prod v'(pre) and Z_net = |det N|.
FactorizationResult density_via_factorization(const GeneratorNet& net, const InputDensity& in, const Vec& z,
                                              bool normalized_escorts = true, int n_per_axis = 0);
// Reuses precomputed escorts for many points.
FactorizationResult density_via_factorization(const GeneratorNet& net, const InputDensity& in, const Vec& z,
                                              const std::vector<UnitEscort>& units, bool normalized_escorts = true);

struct CompactnessReport {
  long long deep_params;
  long long shallow_params_lower_bound;
};
CompactnessReport compactness_report(int d, int L);
std::string compactness_csv(const std::vector<std::pair<int, int>>& dl);

struct NetSpec {
  int d = 2;
  int L = 2;
  std::string activation = "elu";
  double act_param = 0.5;  // mu for mu_relu
  std::string v_out = "identity";
  std::uint64_t seed = 1;
  double weight_scale = 0.5;
  double bias_scale = 0.3;
};

// W_l = I + weight_scale * N(0,1)/sqrt(d), redrawn until |det| >= 0.1.
GeneratorNet random_net(const NetSpec& spec);
// softplus, elu (ELU(1,1)), mu_relu (act_param), lsu, exp (v = exp z - 1), linear.
Activation activation_by_name(const std::string& name, double param = 0.5);

}  // namespace vig
