#include "vigfgan/toy_gan.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <mutex>
#include <sstream>
#include <thread>

#include "vigfgan/errors.hpp"
#include "vigfgan/generator.hpp"

namespace vig {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 6.283185307179586476925;

Eigen::MatrixXd mixture_sample(std::mt19937_64& rng, int n, const std::vector<Eigen::Vector2d>& centers, double sd) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(centers.size()) - 1);
  std::normal_distribution<double> N(0.0, sd);
  Eigen::MatrixXd X(2, n);
  for (int i = 0; i < n; ++i) {
    const auto& c = centers[pick(rng)];
    X(0, i) = c[0] + N(rng);
    X(1, i) = c[1] + N(rng);
  }
  return X;
}

std::function<double(double, double)> mixture_density(std::vector<Eigen::Vector2d> centers, double sd) {
  return [centers = std::move(centers), sd](double x, double y) {
    double s = 0.0;
    for (const auto& c : centers) {
      const double dx = x - c[0], dy = y - c[1];
      s += std::exp(-(dx * dx + dy * dy) / (2 * sd * sd));
    }
    return s / (centers.size() * kTwoPi * sd * sd);
  };
}

Target mixture_target(std::string name, std::vector<Eigen::Vector2d> centers, double sd) {
  Target t;
  t.name = std::move(name);
  t.sample = [centers, sd](std::mt19937_64& rng, int n) { return mixture_sample(rng, n, centers, sd); };
  t.density = mixture_density(std::move(centers), sd);
  return t;
}

bool has_kink(const Activation& a) {
  const auto k = a.kind();
  return k == ActKind::ReLU || k == ActKind::LeakyReLU || k == ActKind::ELU;
}

void append_signs(std::vector<bool>& out, const Mlp::Cache& c) {
  for (size_t l = 0; l + 1 < c.pre.size(); ++l)
    for (Eigen::Index i = 0; i < c.pre[l].size(); ++i) out.push_back(c.pre[l].data()[i] > 0.0);
}

double logsumexp_shifted(const double* d2, int n, double dmin, double inv2h2) {
  double s = 0.0;
  const double cut = dmin + 40.0 / inv2h2;
  for (int j = 0; j < n; ++j)
    if (d2[j] < cut) s += std::exp(-(d2[j] - dmin) * inv2h2);
  return std::log(s) - dmin * inv2h2;
}

// Squared distances from each column of P to each column of C, row-major per point.
std::vector<double> sq_dists(const Eigen::MatrixXd& C, const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(C.cols()), m = static_cast<int>(P.cols());
  std::vector<double> d(static_cast<size_t>(n) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) d[static_cast<size_t>(i) * n + j] = (P.col(i) - C.col(j)).squaredNorm();
  return d;
}

double mean_loglik_from_dists(const std::vector<double>& d2, int n, int m, int dim, double h) {
  const double inv2h2 = 1.0 / (2 * h * h);
  const double norm = -std::log(static_cast<double>(n)) - 0.5 * dim * std::log(kTwoPi * h * h);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const double* row = d2.data() + static_cast<size_t>(i) * n;
    const double dmin = *std::min_element(row, row + n);
    total += logsumexp_shifted(row, n, dmin, inv2h2) + norm;
  }
  return total / m;
}

Eigen::MatrixXd select_cols(const Eigen::MatrixXd& X, const std::vector<int>& idx) {
  Eigen::MatrixXd Y(X.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t k = 0; k < idx.size(); ++k) Y.col(static_cast<Eigen::Index>(k)) = X.col(idx[k]);
  return Y;
}

struct Optimizer {
  std::string kind;
  Adam adam;
  RmsProp rms;
  Sgd sgd;
  Optimizer(const std::string& k, double lr) : kind(k) { adam.lr = rms.lr = sgd.lr = lr; }
  void step(Mlp& net, const Eigen::VectorXd& g) {
    Eigen::VectorXd p = net.params();
    if (kind == "adam") adam.step(p, g);
    else if (kind == "rmsprop") rms.step(p, g);
    else sgd.step(p, g);
    net.set_params(p);
  }
};

struct Nets {
  Mlp G, D;
};

Nets make_nets(const TrainConfig& cfg) {
  auto rng = make_stream(cfg.seed, 1);
  Mlp G({cfg.latent_dim, cfg.hidden, cfg.hidden, 2}, toy_activation(cfg.gen_activation, cfg.gen_mu), rng);
  Mlp D({2, cfg.hidden, cfg.hidden, 1}, toy_activation(cfg.disc_activation, 0.5), rng);
  return {std::move(G), std::move(D)};
}

double sample_mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Target make_target(const std::string& name) {
  if (name == "gauss8_ring") {
    std::vector<Eigen::Vector2d> c;
    for (int k = 0; k < 8; ++k) c.emplace_back(2.0 * std::cos(kTwoPi * k / 8), 2.0 * std::sin(kTwoPi * k / 8));
    return mixture_target(name, std::move(c), 0.05);
  }
  if (name == "grid25") {
    std::vector<Eigen::Vector2d> c;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) c.emplace_back(2.0 * i, 2.0 * j);
    return mixture_target(name, std::move(c), 0.1);
  }
  if (name == "two_moons_gaussianized") {
    Target t;
    t.name = name;
    t.sample = [](std::mt19937_64& rng, int n) {
      std::uniform_real_distribution<double> U(0.0, M_PI);
      std::bernoulli_distribution upper(0.5);
      std::normal_distribution<double> N(0.0, 0.1);
      Eigen::MatrixXd X(2, n);
      for (int i = 0; i < n; ++i) {
        const double a = U(rng);
        double x, y;
        if (upper(rng)) {
          x = std::cos(a);
          y = std::sin(a);
        } else {
          x = 1.0 - std::cos(a);
          y = 0.5 - std::sin(a);
        }
        X(0, i) = (x + N(rng) - 0.5) / 0.872;
        X(1, i) = (y + N(rng) - 0.25) / 0.505;
      }
      return X;
    };
    return t;
  }
  throw UnknownTarget("unknown target: " + name);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  return std::mt19937_64(seq);
}

std::vector<double> default_bandwidths() {
  std::vector<double> h;
  for (int k = 0; k <= 10; ++k) h.push_back(0.01 * std::pow(1.6, k));
  return h;
}

double kde_mean_loglik(const Eigen::MatrixXd& centers, const Eigen::MatrixXd& points, double h) {
  if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
  return mean_loglik_from_dists(sq_dists(centers, points), static_cast<int>(centers.cols()),
                                static_cast<int>(points.cols()), static_cast<int>(centers.rows()), h);
}

KdeResult kde_eval(const Eigen::MatrixXd& model, const Eigen::MatrixXd& holdout, const std::vector<double>& bandwidths) {
  if (model.cols() < 100 || holdout.cols() < 100) throw DomainError("kde needs at least 100 samples each");
  if (model.rows() != holdout.rows()) throw DomainError("kde sample dimensions differ");
  if (bandwidths.empty()) throw DomainError("empty bandwidth grid");
  if (!model.allFinite()) throw DomainError("non-finite model samples");
  const double spread = (model.rowwise().maxCoeff() - model.rowwise().minCoeff()).maxCoeff();
  if (spread < 1e-8) throw DegenerateSamples("model samples collapsed (spread " + fmt_double(spread) + ")");

  const int n = static_cast<int>(model.cols()), dim = static_cast<int>(model.rows());
  std::vector<double> score(bandwidths.size(), 0.0);
  for (int fold = 0; fold < 3; ++fold) {
    std::vector<int> fit, held;
    for (int i = 0; i < n; ++i) (i % 3 == fold ? held : fit).push_back(i);
    const auto C = select_cols(model, fit), P = select_cols(model, held);
    const auto d2 = sq_dists(C, P);
    for (size_t k = 0; k < bandwidths.size(); ++k)
      score[k] += mean_loglik_from_dists(d2, static_cast<int>(fit.size()), static_cast<int>(held.size()), dim,
                                         bandwidths[k]);
  }
  const size_t best = static_cast<size_t>(std::max_element(score.begin(), score.end()) - score.begin());
  return {kde_mean_loglik(model, holdout, bandwidths[best]), bandwidths[best]};
}

std::string to_string(Objective o) { return o == Objective::Gan ? "gan" : "wgan"; }

std::string to_string(OutLink l) {
  switch (l) {
    case OutLink::Sigmoid: return "sigmoid";
    case OutLink::Matsushita: return "matsushita";
    default: return "identity";
  }
}

Objective objective_from_string(const std::string& s) {
  if (s == "gan") return Objective::Gan;
  if (s == "wgan") return Objective::Wgan;
  throw DomainError("unknown objective: " + s);
}

OutLink link_from_string(const std::string& s) {
  if (s == "sigmoid") return OutLink::Sigmoid;
  if (s == "matsushita") return OutLink::Matsushita;
  if (s == "identity") return OutLink::Identity;
  throw DomainError("unknown link: " + s);
}

TrainConfig TrainConfig::defaults(Objective o) {
  TrainConfig c;
  c.objective = o;
  if (o == Objective::Wgan) {
    c.link = OutLink::Identity;
    c.disc_steps_per_gen = 5;
    c.weight_clip = 0.01;
    c.optimizer = "rmsprop";
    c.disc_activation = "relu";
  }
  return c;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw DomainError("lr must be positive");
  if (batch < 1) throw DomainError("batch must be >= 1");
  if (steps < 0) throw DomainError("steps must be >= 0");
  if (disc_steps_per_gen < 1) throw DomainError("disc_steps_per_gen must be >= 1");
  if (weight_clip < 0.0) throw DomainError("weight_clip must be >= 0");
  if (latent_dim < 1 || hidden < 1) throw DomainError("latent_dim and hidden must be >= 1");
  if (eval_every < 1) throw DomainError("eval_every must be >= 1");
  if (optimizer != "adam" && optimizer != "rmsprop" && optimizer != "sgd")
    throw DomainError("unknown optimizer: " + optimizer);
  if (latent != "uniform" && latent != "gaussian") throw DomainError("unknown latent: " + latent);
  if (objective == Objective::Gan && link == OutLink::Identity) throw DomainError("gan needs a squashing link");
  make_target(target);
  toy_activation(gen_activation, gen_mu);
  toy_activation(disc_activation, 0.5);
}

Activation toy_activation(const std::string& name, double mu) {
  if (name == "relu" || (name == "mu_relu" && mu == 1.0)) return Activation::relu();
  if (name == "leaky_relu") return Activation::leaky_relu(0.01, 1.0);
  return activation_by_name(name, mu);
}

ScalarTerm gan_pos(double a, OutLink link) {
  if (link == OutLink::Sigmoid) {
    // -log sigmoid(a) = softplus(-a)
    const double e = std::exp(-std::fabs(a));
    const double sp = std::max(-a, 0.0) + std::log1p(e);
    const double sig_neg = a >= 0 ? e / (1 + e) : 1 / (1 + e);
    return {sp, -sig_neg};
  }
  if (link == OutLink::Matsushita) {
    const double s = std::hypot(1.0, a);
    const double logp = a >= 0 ? std::log((s + a) / (2 * s)) : -std::log(2 * s * (s - a));
    const double d = a >= 0 ? 1.0 / (s * s * (s + a)) : (s - a) / (s * s);
    return {-logp, -d};
  }
  throw DomainError("gan loss needs a squashing link");
}

ScalarTerm gan_neg(double a, OutLink link) {
  if (link == OutLink::Sigmoid) {
    const double e = std::exp(-std::fabs(a));
    const double sp = std::max(a, 0.0) + std::log1p(e);
    const double sig = a >= 0 ? 1 / (1 + e) : e / (1 + e);
    return {sp, sig};
  }
  if (link == OutLink::Matsushita) {
    const double s = std::hypot(1.0, a);
    const double log1mp = a <= 0 ? std::log((s - a) / (2 * s)) : -std::log(2 * s * (s + a));
    const double d = a <= 0 ? -1.0 / (s * s * (s - a)) : -(s + a) / (s * s);
    return {-log1mp, -d};
  }
  throw DomainError("gan loss needs a squashing link");
}

ScalarTerm critic(double a, OutLink link) {
  if (link == OutLink::Identity) return {a, 1.0};
  if (link == OutLink::Matsushita) {
    const double s = std::hypot(1.0, a);
    return {0.5 * (1 + a / s), 0.5 / (s * s * s)};
  }
  throw DomainError("wgan critic uses the identity or Matsushita link");
}

LossGrad disc_loss_grad(const Mlp& D, const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake, Objective o,
                        OutLink link) {
  LossGrad out{0.0, Eigen::VectorXd::Zero(D.num_params())};
  Mlp::Cache cr, cf;
  const Eigen::MatrixXd ar = D.forward(real, &cr), af = D.forward(fake, &cf);
  const double nr = static_cast<double>(real.cols()), nf = static_cast<double>(fake.cols());
  Eigen::MatrixXd dr(1, real.cols()), df(1, fake.cols());
  for (Eigen::Index i = 0; i < ar.cols(); ++i) {
    const auto t = o == Objective::Gan ? gan_pos(ar(0, i), link) : critic(ar(0, i), link);
    const double sgn = o == Objective::Gan ? 1.0 : -1.0;
    out.loss += sgn * t.value / nr;
    dr(0, i) = sgn * t.deriv / nr;
  }
  for (Eigen::Index i = 0; i < af.cols(); ++i) {
    const auto t = o == Objective::Gan ? gan_neg(af(0, i), link) : critic(af(0, i), link);
    out.loss += t.value / nf;
    df(0, i) = t.deriv / nf;
  }
  D.backward(cr, dr, &out.grad);
  D.backward(cf, df, &out.grad);
  return out;
}

LossGrad gen_loss_grad(const Mlp& G, const Mlp& D, const Eigen::MatrixXd& Z, Objective o, OutLink link) {
  LossGrad out{0.0, Eigen::VectorXd::Zero(G.num_params())};
  Mlp::Cache cg, cd;
  const Eigen::MatrixXd X = G.forward(Z, &cg);
  const Eigen::MatrixXd a = D.forward(X, &cd);
  const double n = static_cast<double>(Z.cols());
  Eigen::MatrixXd da(1, Z.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    const auto t = o == Objective::Gan ? gan_pos(a(0, i), link) : critic(a(0, i), link);
    const double sgn = o == Objective::Gan ? 1.0 : -1.0;
    out.loss += sgn * t.value / n;
    da(0, i) = sgn * t.deriv / n;
  }
  const Eigen::MatrixXd dX = D.backward(cd, da, nullptr);
  G.backward(cg, dX, &out.grad);
  return out;
}

Eigen::MatrixXd sample_latent(std::mt19937_64& rng, const TrainConfig& cfg, int n) {
  Eigen::MatrixXd Z(cfg.latent_dim, n);
  if (cfg.latent == "gaussian") {
    std::normal_distribution<double> N(0.0, 1.0);
    for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = N(rng);
  } else {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = U(rng);
  }
  return Z;
}

GradCheckReport gradient_check(const TrainConfig& cfg, int n_coords, std::uint64_t seed) {
  cfg.validate();
  auto nets = make_nets(cfg);
  auto rng = make_stream(seed, 11);
  const auto target = make_target(cfg.target);
  const Eigen::MatrixXd real = target.sample(rng, cfg.batch);
  const Eigen::MatrixXd Z = sample_latent(rng, cfg, cfg.batch);
  const Eigen::MatrixXd fake = nets.G.forward(Z);
  const bool kinked_d = has_kink(nets.D.hidden()), kinked_g = has_kink(nets.G.hidden()) || kinked_d;

  auto disc_eval = [&](const Mlp& D, std::vector<bool>* signs) {
    if (signs) {
      Mlp::Cache c;
      D.forward(real, &c);
      append_signs(*signs, c);
      D.forward(fake, &c);
      append_signs(*signs, c);
    }
    return disc_loss_grad(D, real, fake, cfg.objective, cfg.link).loss;
  };
  auto gen_eval = [&](const Mlp& G, std::vector<bool>* signs) {
    if (signs) {
      Mlp::Cache c, cd;
      const Eigen::MatrixXd X = G.forward(Z, &c);
      append_signs(*signs, c);
      nets.D.forward(X, &cd);
      append_signs(*signs, cd);
    }
    return gen_loss_grad(G, nets.D, Z, cfg.objective, cfg.link).loss;
  };

  GradCheckReport rep{0.0, 0.0, 0, 0};
  auto check = [&](Mlp net, const Eigen::VectorXd& g, bool kinked, auto&& eval, double& worst) {
    const Eigen::VectorXd p0 = net.params();
    std::uniform_int_distribution<int> pick(0, static_cast<int>(p0.size()) - 1);
    std::vector<bool> s0;
    if (kinked) eval(net, &s0);
    for (int c = 0; c < n_coords; ++c) {
      const int j = pick(rng);
      const double h = 1e-4 * std::max(1.0, std::fabs(p0[j]));
      Eigen::VectorXd p = p0;
      std::vector<bool> sp, sm;
      p[j] = p0[j] + h;
      net.set_params(p);
      const double fp = eval(net, kinked ? &sp : nullptr);
      p[j] = p0[j] - h;
      net.set_params(p);
      const double fm = eval(net, kinked ? &sm : nullptr);
      if (kinked && (sp != s0 || sm != s0)) {
        ++rep.skipped;
        continue;
      }
      const double fd = (fp - fm) / (2 * h);
      const double rel = std::fabs(g[j] - fd) / std::max({std::fabs(g[j]), std::fabs(fd), 1e-6});
      worst = std::max(worst, rel);
      ++rep.checked;
    }
  };
  check(nets.D, disc_loss_grad(nets.D, real, fake, cfg.objective, cfg.link).grad, kinked_d, disc_eval,
        rep.max_rel_disc);
  check(nets.G, gen_loss_grad(nets.G, nets.D, Z, cfg.objective, cfg.link).grad, kinked_g, gen_eval,
        rep.max_rel_gen);
  return rep;
}

EvalReport train(const TrainConfig& cfg) {
  cfg.validate();
  auto nets = make_nets(cfg);
  Mlp& G = nets.G;
  Mlp& D = nets.D;
  const auto target = make_target(cfg.target);
  auto rng = make_stream(cfg.seed, 2);
  auto hold_rng = make_stream(cfg.seed, 3);
  auto eval_rng = make_stream(cfg.seed, 4);
  const Eigen::MatrixXd holdout = target.sample(hold_rng, cfg.holdout_samples);
  const Eigen::MatrixXd Z_eval = sample_latent(eval_rng, cfg, cfg.kde_samples);
  const int nb = std::min<int>(256, static_cast<int>(std::min(holdout.cols(), Z_eval.cols())));
  const Eigen::MatrixXd real_eval = holdout.leftCols(nb);

  Optimizer opt_d(cfg.optimizer, cfg.lr), opt_g(cfg.optimizer, cfg.lr);
  EvalReport rep;
  rep.status = "ok";

  auto checkpoint = [&](int step) {
    Checkpoint c{step, kNaN, kNaN, kNaN, kNaN, false};
    const Eigen::MatrixXd X = G.forward(Z_eval);
    if (!X.allFinite()) return c;
    c.disc_loss = disc_loss_grad(D, real_eval, X.leftCols(nb), cfg.objective, cfg.link).loss;
    c.gen_loss = gen_loss_grad(G, D, Z_eval.leftCols(nb), cfg.objective, cfg.link).loss;
    try {
      const auto k = kde_eval(X, holdout, cfg.bandwidths);
      c.kde_loglik = k.loglik;
      c.bandwidth = k.bandwidth;
    } catch (const DegenerateSamples&) {
      c.degenerate = true;
    }
    return c;
  };

  for (int step = 0;; ++step) {
    if (step % cfg.eval_every == 0 || step == cfg.steps) rep.checkpoints.push_back(checkpoint(step));
    if (step == cfg.steps) break;
    bool ok = true;
    for (int k = 0; k < cfg.disc_steps_per_gen && ok; ++k) {
      const Eigen::MatrixXd real = target.sample(rng, cfg.batch);
      const Eigen::MatrixXd fake = G.forward(sample_latent(rng, cfg, cfg.batch));
      const auto lg = disc_loss_grad(D, real, fake, cfg.objective, cfg.link);
      ok = std::isfinite(lg.loss) && lg.grad.allFinite();
      if (ok) opt_d.step(D, lg.grad);
      if (cfg.weight_clip > 0.0) D.clip(cfg.weight_clip);
    }
    if (ok) {
      const auto lg = gen_loss_grad(G, D, sample_latent(rng, cfg, cfg.batch), cfg.objective, cfg.link);
      ok = std::isfinite(lg.loss) && lg.grad.allFinite();
      if (ok) opt_g.step(G, lg.grad);
    }
    if (!ok || !G.finite() || !D.finite()) {
      rep.status = "diverged";
      rep.checkpoints.push_back({step + 1, kNaN, kNaN, kNaN, kNaN, false});
      break;
    }
  }
  for (const auto& c : rep.checkpoints)
    if (std::isfinite(c.kde_loglik) && (rep.best_step < 0 || c.kde_loglik > rep.best_kde)) {
      rep.best_step = c.step;
      rep.best_kde = c.kde_loglik;
    }
  if (rep.best_step < 0) rep.best_kde = kNaN;
  return rep;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(n);
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

namespace {

struct RunSpec {
  TrainConfig cfg;
  std::string label;
};

std::vector<EvalReport> run_all(const std::vector<RunSpec>& runs, const SweepOptions& opts) {
  std::vector<EvalReport> out(runs.size());
  std::mutex mu;
  parallel_for(static_cast<int>(runs.size()), opts.jobs, [&](int i) {
    out[i] = train(runs[i].cfg);
    if (opts.progress) {
      std::lock_guard<std::mutex> lock(mu);
      opts.progress(runs[i].label + " " + out[i].status + " kde=" + fmt_double(out[i].final().kde_loglik));
    }
  });
  return out;
}

TrainConfig sweep_config(const SweepOptions& opts, Objective o, std::uint64_t seed) {
  auto c = TrainConfig::defaults(o);
  c.steps = opts.steps;
  c.eval_every = opts.eval_every;
  c.kde_samples = opts.kde_samples;
  c.holdout_samples = opts.kde_samples;
  c.target = opts.target;
  c.seed = seed;
  return c;
}

std::string status_of(const EvalReport& r) {
  if (r.status != "ok") return r.status;
  return r.final().degenerate ? "degenerate" : "ok";
}

std::string run_tail(const EvalReport& r) {
  const auto& f = r.final();
  return "," + std::to_string(f.step) + "," + fmt_double(f.kde_loglik) + "," + std::to_string(r.best_step) + "," +
         fmt_double(r.best_kde) + "," + fmt_double(r.checkpoints.front().kde_loglik) + "," + status_of(r) + "\n";
}

}  // namespace

SweepCsv experiment_A(const SweepOptions& opts) {
  std::vector<RunSpec> runs;
  const Objective objs[] = {Objective::Gan, Objective::Wgan};
  for (int k = 0; k <= 10; ++k)
    for (auto o : objs)
      for (auto seed : opts.seeds) {
        auto c = sweep_config(opts, o, seed);
        c.gen_mu = k / 10.0;
        c.gen_activation = k == 10 ? "relu" : "mu_relu";
        runs.push_back({c, "A " + c.gen_activation + " mu=" + fmt_double(c.gen_mu) + " " + to_string(o) +
                               " seed=" + std::to_string(seed)});
      }
  const auto res = run_all(runs, opts);

  SweepCsv out;
  std::ostringstream rows, sum;
  rows << "activation,mu,objective,seed,step,kde_loglik,best_step,best_kde_loglik,initial_kde_loglik,status\n";
  sum << "activation,mu,objective,n_ok,mean_kde_loglik,std_kde_loglik\n";
  for (size_t i = 0; i < runs.size(); ++i) {
    const auto& c = runs[i].cfg;
    rows << c.gen_activation << "," << fmt_double(c.gen_mu) << "," << to_string(c.objective) << "," << c.seed
         << run_tail(res[i]);
    if (res[i].status != "ok") ++out.diverged;
  }
  const size_t ns = opts.seeds.size();
  for (size_t g = 0; g < runs.size(); g += ns) {
    std::vector<double> v;
    for (size_t i = g; i < g + ns; ++i)
      if (std::isfinite(res[i].final().kde_loglik)) v.push_back(res[i].final().kde_loglik);
    const auto& c = runs[g].cfg;
    sum << c.gen_activation << "," << fmt_double(c.gen_mu) << "," << to_string(c.objective) << "," << v.size() << ","
        << (v.empty() ? "nan" : fmt_double(sample_mean(v))) << "," << (v.empty() ? "nan" : fmt_double(sample_std(v)))
        << "\n";
  }
  out.runs = rows.str();
  out.summary = sum.str();
  return out;
}

SweepCsv experiment_B(const SweepOptions& opts) {
  std::vector<RunSpec> runs;
  const std::pair<Objective, OutLink> grid[] = {{Objective::Gan, OutLink::Sigmoid},
                                                {Objective::Gan, OutLink::Matsushita},
                                                {Objective::Wgan, OutLink::Identity},
                                                {Objective::Wgan, OutLink::Matsushita}};
  for (const auto& [o, l] : grid)
    for (auto seed : opts.seeds) {
      auto c = sweep_config(opts, o, seed);
      c.link = l;
      runs.push_back({c, "B " + to_string(l) + " " + to_string(o) + " seed=" + std::to_string(seed)});
    }
  const auto res = run_all(runs, opts);

  SweepCsv out;
  std::ostringstream rows, paired;
  rows << "link,objective,seed,step,kde_loglik,best_step,best_kde_loglik,initial_kde_loglik,status\n";
  paired << "objective,seed,baseline_link,kde_baseline,kde_matsushita,diff\n";
  for (size_t i = 0; i < runs.size(); ++i) {
    const auto& c = runs[i].cfg;
    rows << to_string(c.link) << "," << to_string(c.objective) << "," << c.seed << run_tail(res[i]);
    if (res[i].status != "ok") ++out.diverged;
  }
  const size_t ns = opts.seeds.size();
  for (size_t g = 0; g < runs.size(); g += 2 * ns)
    for (size_t s = 0; s < ns; ++s) {
      const auto& base = res[g + s];
      const auto& mat = res[g + ns + s];
      const auto& c = runs[g + s].cfg;
      const double a = base.final().kde_loglik, b = mat.final().kde_loglik;
      paired << to_string(c.objective) << "," << c.seed << "," << to_string(c.link) << "," << fmt_double(a) << ","
             << fmt_double(b) << "," << fmt_double(b - a) << "\n";
    }
  out.runs = rows.str();
  out.summary = paired.str();
  return out;
}

}  // namespace vig
