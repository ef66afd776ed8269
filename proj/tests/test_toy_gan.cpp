#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vigfgan/divergence.hpp"
#include "vigfgan/errors.hpp"
#include "vigfgan/proper_loss.hpp"
#include "vigfgan/toy_gan.hpp"

using namespace vig;
using doctest::Approx;

namespace {

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

SweepOptions quick_sweep() {
  SweepOptions o;
  o.steps = 60;
  o.eval_every = 30;
  o.kde_samples = 300;
  return o;
}

}  // namespace

TEST_CASE("targets are deterministic and well formed") {
  for (const std::string name : {"gauss8_ring", "grid25", "two_moons_gaussianized"}) {
    const auto t = make_target(name);
    auto a = make_stream(0, 9), b = make_stream(0, 9), c = make_stream(1, 9);
    const Eigen::MatrixXd x = t.sample(a, 4), y = t.sample(b, 4), z = t.sample(c, 4);
    CHECK(x.rows() == 2);
    CHECK(x == y);
    CHECK(x != z);
  }
  CHECK_THROWS_AS(make_target("mnist"), UnknownTarget);
  CHECK(!make_target("two_moons_gaussianized").density);
}

TEST_CASE("mixture densities integrate to one") {
  for (const std::string name : {"grid25", "gauss8_ring"}) {
    const auto t = make_target(name);
    const int n = 1200;
    const double lo = -5.5, hi = 5.5, h = (hi - lo) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double w = (i == 0 || i == n ? 0.5 : 1.0) * (j == 0 || j == n ? 0.5 : 1.0);
        s += w * t.density(lo + i * h, lo + j * h);
      }
    CHECK(std::fabs(s * h * h - 1.0) <= 1e-4);
  }
}

TEST_CASE("two moons stay in the box") {
  const auto t = make_target("two_moons_gaussianized");
  auto rng = make_stream(3, 0);
  const Eigen::MatrixXd X = t.sample(rng, 1000000);
  int inside = 0;
  for (Eigen::Index i = 0; i < X.cols(); ++i) inside += std::fabs(X(0, i)) <= 3 && std::fabs(X(1, i)) <= 3;
  CHECK(inside / 1e6 > 0.999);
  CHECK(std::fabs(X.row(0).mean()) < 0.02);
  CHECK(std::fabs(X.row(1).mean()) < 0.02);
}

TEST_CASE("kde log-likelihood against a direct sum") {
  auto rng = make_stream(5, 0);
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd C(2, 50), P(2, 30);
  for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = N(rng);
  for (Eigen::Index i = 0; i < P.size(); ++i) P.data()[i] = 3 * N(rng);
  for (double h : {0.05, 0.3, 2.0}) {
    double oracle = 0.0;
    for (int i = 0; i < 30; ++i) {
      long double s = 0.0;
      for (int j = 0; j < 50; ++j)
        s += std::exp(static_cast<long double>(-(P.col(i) - C.col(j)).squaredNorm() / (2 * h * h)));
      oracle += std::log(static_cast<double>(s) / (50 * 2 * M_PI * h * h));
    }
    // far points underflow in the oracle; compare only when it is finite
    if (std::isfinite(oracle)) CHECK(kde_mean_loglik(C, P, h) == Approx(oracle / 30).epsilon(1e-10));
  }
}

TEST_CASE("kde evaluation") {
  auto rng = make_stream(6, 0);
  const auto ring = make_target("gauss8_ring"), grid = make_target("grid25");
  const Eigen::MatrixXd a = ring.sample(rng, 2000), b = ring.sample(rng, 2000), c = grid.sample(rng, 2000);
  const auto self = kde_eval(a, b), other = kde_eval(c, b);
  CHECK(self.loglik > other.loglik);

  // well-specified smooth data: CV lands strictly inside the grid
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd g(2, 3000), hold(2, 1000);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = N(rng);
  for (Eigen::Index i = 0; i < hold.size(); ++i) hold.data()[i] = N(rng);
  const auto grid_h = default_bandwidths();
  const auto r = kde_eval(g, hold, grid_h);
  CHECK(r.bandwidth > grid_h.front());
  CHECK(r.bandwidth < grid_h.back());
  // standard normal log-density expectation is -log(2 pi) - 1
  CHECK(r.loglik == Approx(-std::log(2 * M_PI) - 1).epsilon(0.03));

  Eigen::MatrixXd collapsed = Eigen::MatrixXd::Constant(2, 500, 0.7);
  CHECK_THROWS_AS(kde_eval(collapsed, hold), DegenerateSamples);
  CHECK_THROWS_AS(kde_eval(g.leftCols(50), hold), DomainError);
}

TEST_CASE("gan loss terms are the log-loss proper loss") {
  const auto f = divergences::gan();
  for (auto [link, pl] : {std::pair{OutLink::Sigmoid, build_loss(f, links::sigmoid())},
                          std::pair{OutLink::Matsushita, build_loss(f, links::matsushita())}}) {
    for (double a = -6; a <= 6; a += 0.37) {
      INFO(to_string(link) << " a=" << a);
      CHECK(gan_pos(a, link).value == Approx(pl.loss_pos(a)).epsilon(1e-9));
      CHECK(gan_neg(a, link).value - 2 * std::log(2.0) == Approx(pl.loss_neg(a)).epsilon(1e-9));
      const double h = 1e-6;
      CHECK(gan_pos(a, link).deriv == Approx((gan_pos(a + h, link).value - gan_pos(a - h, link).value) / (2 * h)).epsilon(1e-6));
      CHECK(gan_neg(a, link).deriv == Approx((gan_neg(a + h, link).value - gan_neg(a - h, link).value) / (2 * h)).epsilon(1e-6));
    }
    for (double a : {-1e8, -1e3, 1e3, 1e8}) {
      CHECK(std::isfinite(gan_pos(a, link).value));
      CHECK(std::isfinite(gan_neg(a, link).value));
      CHECK(std::isfinite(gan_pos(a, link).deriv));
    }
  }
  CHECK(critic(0.3, OutLink::Identity).value == 0.3);
  CHECK(critic(0.0, OutLink::Matsushita).value == 0.5);
  CHECK(critic(0.4, OutLink::Matsushita).deriv ==
        Approx((critic(0.4 + 1e-6, OutLink::Matsushita).value - critic(0.4 - 1e-6, OutLink::Matsushita).value) / 2e-6)
            .epsilon(1e-6));
  CHECK_THROWS_AS(gan_pos(0.0, OutLink::Identity), DomainError);
}

TEST_CASE("manual backprop matches finite differences") {
  for (auto o : {Objective::Gan, Objective::Wgan})
    for (int k = 0; k <= 10; ++k)
      for (auto link : {o == Objective::Gan ? OutLink::Sigmoid : OutLink::Identity, OutLink::Matsushita}) {
        auto cfg = TrainConfig::defaults(o);
        cfg.gen_activation = k == 10 ? "relu" : "mu_relu";
        cfg.gen_mu = k / 10.0;
        cfg.link = link;
        const auto r = gradient_check(cfg, 1000, 100 + k);
        INFO(to_string(o) << " mu=" << k / 10.0 << " " << to_string(link));
        CHECK(r.max_rel_disc <= 1e-4);
        CHECK(r.max_rel_gen <= 1e-4);
        CHECK(r.checked >= 1500);
      }
}

TEST_CASE("config validation") {
  auto c = TrainConfig::defaults(Objective::Gan);
  CHECK_NOTHROW(c.validate());
  c.lr = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = TrainConfig::defaults(Objective::Gan);
  c.batch = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = TrainConfig::defaults(Objective::Gan);
  c.link = OutLink::Identity;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = TrainConfig::defaults(Objective::Gan);
  c.target = "lsun";
  CHECK_THROWS_AS(c.validate(), UnknownTarget);
  const auto w = TrainConfig::defaults(Objective::Wgan);
  CHECK(w.disc_steps_per_gen == 5);
  CHECK(w.weight_clip == 0.01);
  CHECK(w.lr == 2e-4);
  CHECK(w.batch == 64);
}

TEST_CASE("training is deterministic") {
  auto c = TrainConfig::defaults(Objective::Wgan);
  c.steps = 40;
  c.eval_every = 20;
  c.kde_samples = c.holdout_samples = 300;
  const auto a = train(c), b = train(c);
  REQUIRE(a.checkpoints.size() == 3);
  for (size_t i = 0; i < a.checkpoints.size(); ++i) {
    CHECK(a.checkpoints[i].step == b.checkpoints[i].step);
    CHECK(fmt_double(a.checkpoints[i].kde_loglik) == fmt_double(b.checkpoints[i].kde_loglik));
    CHECK(fmt_double(a.checkpoints[i].disc_loss) == fmt_double(b.checkpoints[i].disc_loss));
  }
  CHECK(a.status == "ok");
}

TEST_CASE("divergence is recorded, not thrown") {
  auto c = TrainConfig::defaults(Objective::Gan);
  c.optimizer = "sgd";
  c.lr = 1e200;
  c.steps = 50;
  c.eval_every = 25;
  c.kde_samples = c.holdout_samples = 200;
  EvalReport r;
  CHECK_NOTHROW(r = train(c));
  CHECK(r.status == "diverged");
  CHECK(std::isnan(r.final().kde_loglik));
}

TEST_CASE("default gan improves the holdout likelihood") {
  int improved = 0;
  for (std::uint64_t seed : {0, 1, 2}) {
    auto c = TrainConfig::defaults(Objective::Gan);
    c.seed = seed;
    const auto r = train(c);
    MESSAGE("seed " << seed << ": step0 " << r.checkpoints.front().kde_loglik << " best " << r.best_kde << " at "
                    << r.best_step);
    improved += r.status == "ok" && r.best_kde > r.checkpoints.front().kde_loglik;
  }
  CHECK(improved >= 2);
}

TEST_CASE("experiment csv shapes and determinism") {
  auto o = quick_sweep();
  const auto a = experiment_A(o);
  CHECK(count_lines(a.runs) == 1 + 11 * 2 * 3);
  CHECK(a.runs.rfind("activation,mu,objective,seed,step,kde_loglik,", 0) == 0);
  CHECK(a.runs.find("\nrelu,1,gan,0,") != std::string::npos);
  CHECK(a.runs.find("\nrelu,1,wgan,2,") != std::string::npos);
  CHECK(a.runs.find("\nmu_relu,0.5,wgan,1,") != std::string::npos);
  CHECK(count_lines(a.summary) == 1 + 11 * 2);
  o.jobs = 3;
  CHECK(experiment_A(o).runs == a.runs);

  o.jobs = 1;
  const auto b = experiment_B(o);
  CHECK(count_lines(b.runs) == 1 + 12);
  CHECK(b.runs.rfind("link,objective,seed,step,kde_loglik,", 0) == 0);
  for (const std::string row : {"\nsigmoid,gan,", "\nmatsushita,gan,", "\nidentity,wgan,", "\nmatsushita,wgan,"})
    CHECK(b.runs.find(row) != std::string::npos);
  CHECK(count_lines(b.summary) == 1 + 6);
  CHECK(b.diverged == 0);
  CHECK(experiment_B(o).runs == b.runs);
}
