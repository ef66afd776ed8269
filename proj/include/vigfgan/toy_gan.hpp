#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vigfgan/activation.hpp"
#include "vigfgan/mlp.hpp"

namespace vig {

// 2-D synthetic targets; samples are 2 x n.
struct Target {
  std::string name;
  std::function<Eigen::MatrixXd(std::mt19937_64&, int)> sample;
  std::function<double(double, double)> density;  // empty when not analytic
};

// gauss8_ring, two_moons_gaussianized, grid25; UnknownTarget otherwise.
Target make_target(const std::string& name);

// Independent RNG stream for (seed, stream).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

struct KdeResult {
  double loglik;     // mean log-density of the holdout
  double bandwidth;  // chosen by 3-fold CV on the model samples
};

std::vector<double> default_bandwidths();
// Isotropic Gaussian KDE; DegenerateSamples if every coordinate of the model samples has spread < 1e-8.
KdeResult kde_eval(const Eigen::MatrixXd& model, const Eigen::MatrixXd& holdout,
                   const std::vector<double>& bandwidths = default_bandwidths());
// Mean log-density of `points` under the KDE centred at `centers` with bandwidth h.
double kde_mean_loglik(const Eigen::MatrixXd& centers, const Eigen::MatrixXd& points, double h);

enum class Objective { Gan, Wgan };
// Discriminator output squashing: sigmoid / Matsushita for gan, identity / Matsushita for wgan.
enum class OutLink { Sigmoid, Matsushita, Identity };

std::string to_string(Objective o);
std::string to_string(OutLink l);
Objective objective_from_string(const std::string& s);
OutLink link_from_string(const std::string& s);

struct TrainConfig {
  Objective objective = Objective::Gan;
  OutLink link = OutLink::Sigmoid;
  std::string gen_activation = "relu";  // relu, mu_relu, softplus, elu, lsu, ...
  double gen_mu = 0.5;                  // mu for mu_relu
  std::string disc_activation = "elu";   // relu for wgan
  std::string target = "gauss8_ring";
  std::string optimizer = "adam";  // adam, rmsprop, sgd
  std::string latent = "uniform";  // uniform on [0,1]^k or gaussian
  double lr = 2e-4;
  int batch = 64;
  int steps = 2000;
  std::uint64_t seed = 0;
  int disc_steps_per_gen = 1;
  double weight_clip = 0.0;
  int latent_dim = 8;
  int hidden = 64;
  int eval_every = 500;
  int kde_samples = 4000;
  int holdout_samples = 4000;
  std::vector<double> bandwidths = default_bandwidths();

  // gan: 1 disc step, Adam, no clipping; wgan: 5 disc steps, RMSprop, clip 0.01, ReLU critic.
  static TrainConfig defaults(Objective o);
  void validate() const;
};

Activation toy_activation(const std::string& name, double mu);

// Per-sample discriminator terms for the gan objective: l(+1, a) = -log p(a), l(-1, a) = -log(1 - p(a)),
// with p the squashing of the link; and the wgan critic value T(a). Each with its derivative in a.
struct ScalarTerm {
  double value;
  double deriv;
};
ScalarTerm gan_pos(double a, OutLink link);
ScalarTerm gan_neg(double a, OutLink link);
ScalarTerm critic(double a, OutLink link);

struct LossGrad {
  double loss;
  Eigen::VectorXd grad;
};
LossGrad disc_loss_grad(const Mlp& D, const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake, Objective o,
                        OutLink link);
// Non-saturating generator loss for gan, -E[T] for wgan.
LossGrad gen_loss_grad(const Mlp& G, const Mlp& D, const Eigen::MatrixXd& Z, Objective o, OutLink link);

Eigen::MatrixXd sample_latent(std::mt19937_64& rng, const TrainConfig& cfg, int n);

struct GradCheckReport {
  double max_rel_disc;
  double max_rel_gen;
  int checked;
  int skipped;  // coordinates whose perturbation crosses an activation kink
};
// Manual backprop vs central differences on n_coords random coordinates of each net.
GradCheckReport gradient_check(const TrainConfig& cfg, int n_coords = 1000, std::uint64_t seed = 7);

struct Checkpoint {
  int step;
  double kde_loglik;  // NaN when degenerate
  double bandwidth;
  double disc_loss;
  double gen_loss;
  bool degenerate;
};

struct EvalReport {
  std::vector<Checkpoint> checkpoints;
  std::string status;  // ok, diverged
  int best_step = -1;
  double best_kde = 0.0;
  const Checkpoint& final() const { return checkpoints.back(); }
};

EvalReport train(const TrainConfig& cfg);

struct SweepOptions {
  int steps = 2000;
  int eval_every = 500;
  int kde_samples = 4000;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::string target = "gauss8_ring";
  int jobs = 1;
  std::function<void(const std::string&)> progress;
};

struct SweepCsv {
  std::string runs;     // one row per run
  std::string summary;  // experiment A: mean/std per (activation, mu, objective); B: paired seeds
  int diverged = 0;
};

// mu in {0, 0.1, ..., 1} (mu = 1 is the ReLU baseline) x {gan, wgan} x seeds.
SweepCsv experiment_A(const SweepOptions& opts);
// {sigmoid | identity, matsushita} x {gan, wgan} x seeds.
SweepCsv experiment_B(const SweepOptions& opts);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

std::string fmt_double(double v);

}  // namespace vig
