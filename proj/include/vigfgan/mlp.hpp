#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "vigfgan/activation.hpp"

namespace vig {

// Fully connected net, hidden activation on every layer but the last, identity output.
// Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp(std::vector<int> dims, Activation hidden, std::mt19937_64& rng);

  struct Cache {
    std::vector<Eigen::MatrixXd> pre;  // per layer, before activation
    std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[l+1] = output of layer l
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& X, Cache* cache = nullptr) const;
  // Accumulates d(loss)/d(params) into grad (flat layout) and returns d(loss)/d(input).
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& dOut, Eigen::VectorXd* grad) const;

  int num_params() const;
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& p);
  void clip(double c);
  bool finite() const;

  const std::vector<int>& dims() const { return dims_; }
  const Activation& hidden() const { return act_; }

 private:
  std::vector<int> dims_;
  std::vector<Eigen::MatrixXd> W_;
  std::vector<Eigen::VectorXd> b_;
  Activation act_;
};

struct Adam {
  double lr, beta1 = 0.5, beta2 = 0.999, eps = 1e-8;
  Eigen::VectorXd m, v;
  long t = 0;
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
};

struct RmsProp {
  double lr, rho = 0.99, eps = 1e-8;
  Eigen::VectorXd s;
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
};

struct Sgd {
  double lr;
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) const { params -= lr * grad; }
};

}  // namespace vig
