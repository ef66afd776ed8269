#include "vigfgan/generator.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "vigfgan/errors.hpp"

namespace vig {

namespace {

constexpr double kDetFloor = 1e-8;

void check_square(const Mat& M, int d, const char* what) {
  if (M.rows() != d || M.cols() != d) throw DomainError(std::string(what) + " must be d x d");
  if (!(std::fabs(M.determinant()) > kDetFloor)) throw DomainError(std::string(what) + " is (nearly) singular");
}

}  // namespace

GeneratorNet::GeneratorNet(std::vector<DenseLayer> layers, Activation act, Mat Gamma, Vec beta,
                           std::optional<Activation> v_out)
    : d_(static_cast<int>(Gamma.rows())),
      layers_(std::move(layers)),
      act_(std::move(act)),
      Gamma_(std::move(Gamma)),
      beta_(std::move(beta)),
      v_out_(std::move(v_out)) {
  if (d_ < 1) throw DomainError("generator dimension must be >= 1");
  check_square(Gamma_, d_, "Gamma");
  if (beta_.size() != d_) throw DomainError("beta must have d entries");
  for (const auto& l : layers_) {
    check_square(l.W, d_, "W");
    if (l.b.size() != d_) throw DomainError("b must have d entries");
    lu_.emplace_back(l.W);
  }
  lu_Gamma_.compute(Gamma_);
}

std::vector<Vec> GeneratorNet::hidden(const Vec& x) const {
  std::vector<Vec> phi{x};
  for (const auto& l : layers_) phi.push_back((l.W * phi.back() + l.b).unaryExpr([&](double t) { return act_(t); }));
  return phi;
}

Vec GeneratorNet::forward(const Vec& x) const {
  Vec out = Gamma_ * hidden(x).back() + beta_;
  if (v_out_) out = out.unaryExpr([&](double t) { return (*v_out_)(t); });
  return out;
}

Vec GeneratorNet::inverse(const Vec& z) const {
  Vec u = z;
  if (v_out_) u = u.unaryExpr([&](double t) { return v_out_->inverse(t); });
  Vec phi = lu_Gamma_.solve(u - beta_);
  for (int l = depth() - 1; l >= 0; --l) {
    const Vec pre = phi.unaryExpr([&](double t) { return act_.inverse(t); });
    phi = lu_[l].solve(pre - layers_[l].b);
  }
  return phi;
}

Mat GeneratorNet::jacobian(const Vec& x) const {
  Mat J = Mat::Identity(d_, d_);
  Vec phi = x;
  for (const auto& l : layers_) {
    const Vec pre = l.W * phi + l.b;
    const Vec dv = pre.unaryExpr([&](double t) { return act_.derivative(t); });
    J = dv.asDiagonal() * (l.W * J);
    phi = pre.unaryExpr([&](double t) { return act_(t); });
  }
  J = Gamma_ * J;
  if (v_out_) {
    const Vec pre = Gamma_ * phi + beta_;
    J = pre.unaryExpr([&](double t) { return v_out_->derivative(t); }).asDiagonal() * J;
  }
  return J;
}

GeneratorNet GeneratorNet::with_bias(int layer, Vec b) const {
  auto layers = layers_;
  layers.at(layer).b = std::move(b);
  return GeneratorNet(std::move(layers), act_, Gamma_, beta_, v_out_);
}

InputDensity uniform_box(int d, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("empty input box");
  const double vol = std::pow(hi - lo, d);
  return {d, lo, hi, [d, lo, hi, vol](const Vec& x) {
            for (int i = 0; i < d; ++i)
              if (x[i] < lo || x[i] > hi) return 0.0;
            return 1.0 / vol;
          }};
}

InputDensity standard_gaussian(int d, double bound) {
  return {d, -bound, bound, [d](const Vec& x) {
            return std::exp(-0.5 * x.squaredNorm()) / std::pow(2.0 * M_PI, 0.5 * d);
          }};
}

Mat finite_difference_jacobian(const GeneratorNet& net, const Vec& x, double h) {
  const int d = net.dim();
  Mat J(d, d);
  for (int j = 0; j < d; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (net.forward(xp) - net.forward(xm)) / (2.0 * h);
  }
  return J;
}

double density_via_jacobian(const GeneratorNet& net, const InputDensity& in, const Vec& z) {
  const Vec x = net.inverse(z);
  const double det = net.jacobian(x).determinant();
  if (!std::isfinite(det) || !(std::fabs(det) > 1e-300)) throw SingularJacobian("generator Jacobian is singular");
  return in.pdf(x) / std::fabs(det);
}

int default_nodes_per_axis(int d) {
  switch (d) {
    case 1: return 2001;
    case 2: return 201;
    case 3: return 41;
    default: throw DomainError("escort quadrature supports d <= 3");
  }
}

BoxQuadrature box_quadrature(const InputDensity& in, int n) {
  if (n < 3 || n % 2 == 0) throw DomainError("node count per axis must be odd and >= 3");
  if (in.d > 3) throw DomainError("escort quadrature supports d <= 3");
  const double h = (in.hi - in.lo) / (n - 1);
  std::vector<double> x1(n), w1(n);
  for (int i = 0; i < n; ++i) {
    x1[i] = in.lo + h * i;
    w1[i] = h / 3.0 * (i == 0 || i == n - 1 ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  BoxQuadrature q;
  long total = 1;
  for (int k = 0; k < in.d; ++k) total *= n;
  q.nodes.reserve(total);
  q.weights.reserve(total);
  for (long idx = 0; idx < total; ++idx) {
    Vec x(in.d);
    double w = 1.0;
    long r = idx;
    for (int k = 0; k < in.d; ++k) {
      const int i = static_cast<int>(r % n);
      r /= n;
      x[k] = x1[i];
      w *= w1[i];
    }
    q.nodes.push_back(std::move(x));
    q.weights.push_back(w);
  }
  return q;
}

namespace {

struct UnitCtx {
  SignatureForm form;
  const Activation& act;
  // exp_chi(t), read off the activation: v = k + k' exp_chi
  double P(double t) const { return (act(t) - form.k) / form.kp; }
  double dP(double t) const { return act.derivative(t) / form.kp; }
};

UnitEscort unit_stats(const UnitCtx& u, const std::vector<double>& pre, const std::vector<double>& w, int l, int i,
                      double b) {
  double mass = 0.0, Z = 0.0;
  for (size_t n = 0; n < pre.size(); ++n) {
    const double p = u.P(pre[n] + b);
    mass += w[n] * p;
    Z += w[n] * u.form.chi(p);
  }
  if (!std::isfinite(Z) || !(Z > 0.0)) throw DivergentNormalizer("unit escort normalizer is not positive and finite");
  return {l, i, b, mass, Z};
}

// b with int P(pre + b) dmu = 1: bracket by doubling, then safeguarded Newton.
double solve_bias(const UnitCtx& u, const std::vector<double>& pre, const std::vector<double>& w, double b0) {
  auto F = [&](double b) {
    double s = 0.0, ds = 0.0;
    for (size_t n = 0; n < pre.size(); ++n) {
      s += w[n] * u.P(pre[n] + b);
      ds += w[n] * u.dP(pre[n] + b);
    }
    return std::pair{s - 1.0, ds};
  };
  double lo = b0 - 1.0, hi = b0 + 1.0;
  for (int it = 0; F(lo).first > 0.0; ++it) {
    if (it > 60) throw DivergentNormalizer("no bias normalizes the unit");
    lo -= 2.0 * (hi - lo);
  }
  for (int it = 0; F(hi).first < 0.0; ++it) {
    if (it > 60) throw DivergentNormalizer("no bias normalizes the unit");
    hi += 2.0 * (hi - lo);
  }
  double b = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto [f, df] = F(b);
    if (!std::isfinite(f)) throw DivergentNormalizer("unit mass is not finite");
    if (std::fabs(f) < 1e-14) break;
    (f > 0.0 ? hi : lo) = b;
    double next = df > 0.0 ? b - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - b) < 1e-15 * std::max(1.0, std::fabs(b))) {
      b = next;
      break;
    }
    b = next;
  }
  return b;
}

GeneratorNet escort_pass(const GeneratorNet& net, const InputDensity& in, int n, bool solve,
                         std::vector<UnitEscort>* out) {
  if (in.d != net.dim()) throw DomainError("input density dimension does not match the net");
  const auto q = box_quadrature(in, n ? n : default_nodes_per_axis(in.d));
  const UnitCtx u{signature_form(net.activation()), net.activation()};
  GeneratorNet cur = net;
  std::vector<Vec> phi = q.nodes;
  std::vector<double> pre(phi.size());
  for (int l = 0; l < cur.depth(); ++l) {
    Vec b = cur.layers()[l].b;
    const Mat W = cur.layers()[l].W;
    for (int i = 0; i < cur.dim(); ++i) {
      for (size_t k = 0; k < phi.size(); ++k) pre[k] = W.row(i).dot(phi[k]);
      if (solve) b[i] = solve_bias(u, pre, q.weights, b[i]);
      if (out) out->push_back(unit_stats(u, pre, q.weights, l, i, b[i]));
    }
    if (solve) cur = cur.with_bias(l, b);
    for (auto& p : phi) p = (W * p + b).unaryExpr([&](double t) { return u.act(t); });
  }
  return cur;
}

}  // namespace

GeneratorNet normalize_biases(const GeneratorNet& net, const InputDensity& in, int n_per_axis) {
  return escort_pass(net, in, n_per_axis, true, nullptr);
}

std::vector<UnitEscort> unit_escorts(const GeneratorNet& net, const InputDensity& in, int n_per_axis) {
  std::vector<UnitEscort> units;
  escort_pass(net, in, n_per_axis, false, &units);
  return units;
}

FactorizationResult density_via_factorization(const GeneratorNet& net, const InputDensity& in, const Vec& z,
                                              bool normalized_escorts, int n_per_axis) {
  return density_via_factorization(net, in, z, unit_escorts(net, in, n_per_axis), normalized_escorts);
}

FactorizationResult density_via_factorization(const GeneratorNet& net, const InputDensity& in, const Vec& z,
                                              const std::vector<UnitEscort>& units, bool normalized_escorts) {
  const auto form = signature_form(net.activation());
  const Vec x = net.inverse(z);
  const auto phi = net.hidden(x);
  FactorizationResult r{};
  r.units = units;
  r.q_in = in.pdf(x);
  r.q_deep = 1.0;
  double prodZ = 1.0, detN = net.Gamma().determinant();
  for (int l = 0; l < net.depth(); ++l) {
    const auto& layer = net.layers()[l];
    detN *= layer.W.determinant();
    const Vec pre = layer.W * phi[l] + layer.b;
    for (int i = 0; i < net.dim(); ++i) {
      const double c = form.chi((net.activation()(pre[i]) - form.k) / form.kp);
      if (normalized_escorts) {
        const double Z = units.at(l * net.dim() + i).Z;
        r.q_deep *= c / Z;
        prodZ *= Z;
      } else {
        r.q_deep *= form.kp * c;
      }
    }
  }
  r.h_out = 1.0;
  if (net.v_out()) {
    const Vec pre = net.Gamma() * phi.back() + net.beta();
    for (int i = 0; i < net.dim(); ++i) r.h_out *= std::fabs(net.v_out()->derivative(pre[i]));
  }
  r.z_net = std::fabs(detN);
  if (normalized_escorts) r.z_net *= std::pow(form.kp, net.depth() * net.dim()) * prodZ;
  const double denom = r.q_deep * r.h_out * r.z_net;
  if (!(denom > 0.0) || !std::isfinite(denom)) throw SingularJacobian("factorization denominator vanishes");
  r.q_g = r.q_in / denom;
  return r;
}

CompactnessReport compactness_report(int d, int L) {
  if (d < 1 || L < 1) throw DomainError("compactness report needs d, L >= 1");
  const long long dd = static_cast<long long>(d) * d;
  return {L * dd + dd, static_cast<long long>(L) * L * dd};
}

std::string compactness_csv(const std::vector<std::pair<int, int>>& dl) {
  std::ostringstream os;
  os << "d,L,deep_params,shallow_params_lower_bound\n";
  for (auto [d, L] : dl) {
    const auto r = compactness_report(d, L);
    os << d << ',' << L << ',' << r.deep_params << ',' << r.shallow_params_lower_bound << '\n';
  }
  return os.str();
}

Activation activation_by_name(const std::string& name, double param) {
  if (name == "softplus") return Activation::softplus();
  if (name == "elu") return Activation::elu(1.0, 1.0);
  if (name == "mu_relu") return Activation::mu_relu(param);
  if (name == "lsu") return Activation::lsu();
  if (name == "exp") return activation_from_signature(Signature::identity(), -1.0, 1.0);
  if (name == "linear" || name == "identity") return Activation::linear();
  throw DomainError("unknown activation: " + name);
}

GeneratorNet random_net(const NetSpec& spec) {
  if (spec.d < 1 || spec.L < 1) throw DomainError("net needs d, L >= 1");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> N(0.0, 1.0);
  auto matrix = [&] {
    for (;;) {
      Mat W = Mat::Identity(spec.d, spec.d);
      for (int i = 0; i < spec.d; ++i)
        for (int j = 0; j < spec.d; ++j) W(i, j) += spec.weight_scale * N(rng) / std::sqrt(spec.d);
      if (std::fabs(W.determinant()) >= 0.1) return W;
    }
  };
  auto vec = [&] {
    Vec b(spec.d);
    for (int i = 0; i < spec.d; ++i) b[i] = spec.bias_scale * N(rng);
    return b;
  };
  std::vector<DenseLayer> layers;
  for (int l = 0; l < spec.L; ++l) {
    Mat W = matrix();
    layers.push_back({std::move(W), vec()});
  }
  Mat G = matrix();
  Vec beta = vec();
  std::optional<Activation> out;
  if (spec.v_out != "identity" && spec.v_out != "linear") out = activation_by_name(spec.v_out, spec.act_param);
  return GeneratorNet(std::move(layers), activation_by_name(spec.activation, spec.act_param), std::move(G),
                      std::move(beta), std::move(out));
}

}  // namespace vig
