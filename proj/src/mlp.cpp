#include "vigfgan/mlp.hpp"

#include <cmath>

#include "vigfgan/errors.hpp"

namespace vig {

Mlp::Mlp(std::vector<int> dims, Activation hidden, std::mt19937_64& rng) : dims_(std::move(dims)), act_(std::move(hidden)) {
  if (dims_.size() < 2) throw DomainError("an MLP needs at least input and output sizes");
  std::normal_distribution<double> N(0.0, 1.0);
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    const int in = dims_[l], out = dims_[l + 1];
    if (in < 1 || out < 1) throw DomainError("layer sizes must be positive");
    const double sd = std::sqrt(1.0 / in);
    Eigen::MatrixXd W(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) W(i, j) = sd * N(rng);
    W_.push_back(std::move(W));
    b_.push_back(Eigen::VectorXd::Zero(out));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& X, Cache* cache) const {
  Eigen::MatrixXd A = X;
  if (cache) {
    cache->pre.clear();
    cache->act.assign(1, X);
  }
  const size_t L = W_.size();
  for (size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd Z = (W_[l] * A).colwise() + b_[l];
    if (l + 1 < L) {
      const auto& f = act_.impl();
      A = Z.unaryExpr([&](double t) { return f.eval(t); });
    } else {
      A = Z;
    }
    if (cache) {
      cache->pre.push_back(std::move(Z));
      cache->act.push_back(A);
    }
  }
  return A;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dOut, Eigen::VectorXd* grad) const {
  const int L = static_cast<int>(W_.size());
  std::vector<int> offset(L);
  for (int l = 0, o = 0; l < L; ++l) {
    offset[l] = o;
    o += static_cast<int>(W_[l].size() + b_[l].size());
  }
  Eigen::MatrixXd dA = dOut;
  for (int l = L - 1; l >= 0; --l) {
    Eigen::MatrixXd dZ = dA;
    if (l + 1 < L) {
      const auto& f = act_.impl();
      dZ = dA.cwiseProduct(cache.pre[l].unaryExpr([&](double t) { return f.derivative(t); }));
    }
    if (grad) {
      Eigen::Map<Eigen::MatrixXd> gW(grad->data() + offset[l], W_[l].rows(), W_[l].cols());
      gW += dZ * cache.act[l].transpose();
      Eigen::Map<Eigen::VectorXd> gb(grad->data() + offset[l] + W_[l].size(), b_[l].size());
      gb += dZ.rowwise().sum();
    }
    dA = W_[l].transpose() * dZ;
  }
  return dA;
}

int Mlp::num_params() const {
  int n = 0;
  for (size_t l = 0; l < W_.size(); ++l) n += static_cast<int>(W_[l].size() + b_[l].size());
  return n;
}

Eigen::VectorXd Mlp::params() const {
  Eigen::VectorXd p(num_params());
  int o = 0;
  for (size_t l = 0; l < W_.size(); ++l) {
    p.segment(o, W_[l].size()) = Eigen::Map<const Eigen::VectorXd>(W_[l].data(), W_[l].size());
    o += static_cast<int>(W_[l].size());
    p.segment(o, b_[l].size()) = b_[l];
    o += static_cast<int>(b_[l].size());
  }
  return p;
}

void Mlp::set_params(const Eigen::VectorXd& p) {
  if (p.size() != num_params()) throw DomainError("parameter vector has the wrong size");
  int o = 0;
  for (size_t l = 0; l < W_.size(); ++l) {
    W_[l] = Eigen::Map<const Eigen::MatrixXd>(p.data() + o, W_[l].rows(), W_[l].cols());
    o += static_cast<int>(W_[l].size());
    b_[l] = p.segment(o, b_[l].size());
    o += static_cast<int>(b_[l].size());
  }
}

void Mlp::clip(double c) {
  for (auto& W : W_) W = W.cwiseMax(-c).cwiseMin(c);
  for (auto& b : b_) b = b.cwiseMax(-c).cwiseMin(c);
}

bool Mlp::finite() const {
  for (size_t l = 0; l < W_.size(); ++l)
    if (!W_[l].allFinite() || !b_[l].allFinite()) return false;
  return true;
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (m.size() != grad.size()) {
    m = Eigen::VectorXd::Zero(grad.size());
    v = Eigen::VectorXd::Zero(grad.size());
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t)), c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

void RmsProp::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (s.size() != grad.size()) s = Eigen::VectorXd::Zero(grad.size());
  s = rho * s + (1.0 - rho) * grad.cwiseAbs2();
  params.array() -= lr * grad.array() / (s.array().sqrt() + eps);
}

}  // namespace vig
