#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"
#include "vigfgan/proper_loss.hpp"
#include "vigfgan/vig.hpp"

using namespace vig;
using doctest::Approx;

namespace {

std::vector<LinkFunction> all_links() {
  return {links::canonical(divergences::gan()), links::canonical(divergences::kl()), links::sigmoid(),
          links::matsushita(), links::vig(Signature::identity(), 1.0), links::vig(Signature::power_q(2.0), 0.3),
          links::vig(Signature::gan(), 2.0), links::identity()};
}

// Bisection oracle for the inverse of a monotone link.
double bisect_inverse(const LinkFunction& L, double v) {
  const bool up = L.eval(0.75) > L.eval(0.25);
  double lo = 1e-12, hi = 1.0 - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((L.eval(mid) < v) == up ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("links are strictly monotone and invert") {
  for (const auto& L : all_links()) {
    INFO(L.name);
    double prev = L.eval(0.001);
    const bool up = L.eval(0.5) > prev;
    for (int i = 2; i < 1000; ++i) {
      const double cur = L.eval(i / 1000.0);
      CHECK((up ? cur > prev : cur < prev));
      prev = cur;
    }
    for (double z = 0.01; z < 0.99; z += 0.0049) {
      CHECK(std::fabs(L.inverse(L.eval(z)) - z) <= 1e-10);
      CHECK(std::fabs(bisect_inverse(L, L.eval(z)) - z) <= 1e-10);
    }
    CHECK_THROWS_AS(L.eval(0.0), DomainError);
    CHECK_THROWS_AS(L.eval(1.0), DomainError);
  }
}

TEST_CASE("matsushita printed form") {
  CHECK(matsushita_link(0.0) == 0.5);
  for (double v = -20; v <= 20; v += 0.37) {
    CHECK(matsushita_link(v) + matsushita_link(-v) == Approx(1.0).epsilon(1e-15));
    CHECK(matsushita_link(v + 0.01) > matsushita_link(v));
  }
  CHECK_THROWS_AS(matsushita_link(NAN), DomainError);
  auto L = links::matsushita();
  for (double z = 0.01; z < 0.99; z += 0.01) CHECK(matsushita_link(L.eval(z)) == Approx(z).epsilon(1e-12));
}

TEST_CASE("gan canonical loss is logistic") {
  auto L = build_loss(divergences::gan(), links::canonical(divergences::gan()));
  CHECK(L.loss_pos(L.link(0.5)) == Approx(std::log(2.0)).epsilon(1e-12));
  auto S = build_loss(divergences::gan(), links::sigmoid());
  for (double z = -6; z <= 6; z += 0.5) {
    CHECK(S.loss_pos(z) == Approx(std::log1p(std::exp(-z))).epsilon(1e-10));
    CHECK(S.loss_neg(z) == Approx(std::log1p(std::exp(z)) - 2 * std::log(2.0)).epsilon(1e-10));
  }
}

TEST_CASE("non-monotone link is rejected") {
  LinkFunction bad{LinkKind::IdentityLink, "bump", [](double z) { return z * (1 - z); }, [](double v) { return v; }};
  CHECK_THROWS_AS(build_loss(divergences::kl(), bad), NonInvertibleLink);
}

TEST_CASE("composite properness") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.02, 0.98);
  std::vector<ProperLoss> losses = {
      build_loss(divergences::gan(), links::sigmoid()),
      build_loss(divergences::kl(), links::canonical(divergences::kl())),
      build_loss(divergences::pearson(), links::matsushita()),
      build_loss(divergences::jensen_shannon(), links::identity()),
      vig_loss(Signature::identity(), 1.0),
      vig_loss(Signature::power_q(2.0), 0.4),
  };
  for (const auto& L : losses) {
    INFO(L.link.name << " " << L.f.name);
    const int n = L.link.kind == LinkKind::VigLink ? 60 : 1000;
    double lo = L.link(0.005), hi = L.link(0.995);
    if (lo > hi) std::swap(lo, hi);
    for (int k = 0; k < n; ++k) {
      const double eta = U(rng);
      const double v = num::golden_min([&](double v) { return L.partial_risk(eta, v); }, lo, hi, 1e-12);
      CHECK(std::fabs(v - L.link(eta)) <= 1e-4 * std::max(1.0, std::fabs(v)));
    }
  }
}

TEST_CASE("vig loss and link") {
  auto L = vig_loss(Signature::identity(), 1.0);
  CHECK(L.link(0.5) == -1.0);
  for (double z = 0.05; z < 1; z += 0.05) CHECK(L.link(z) == Approx(-(1 - z) / z).epsilon(1e-14));
  for (const auto& sig : {Signature::identity(), Signature::gan(), Signature::power_q(2.0), Signature::mu_relu_chi(0.5)})
    for (double q : {0.1, 1.0, 3.0}) {
      auto V = vig_loss(sig, q);
      CHECK(V.loss_neg(-1.0) == 0.0);
      CHECK_THROWS_AS(V.loss_neg(0.5), DomainError);
      for (double z : {0.2, 0.5, 0.8}) CHECK(V.link(z) == Approx(-1.0 / (sig(q * z / (1 - z)) / q)).epsilon(1e-14));
    }
  // identity: chi*_{1/q} is the identity, so the loss is -log(-t) for every q
  auto I = vig_loss(Signature::identity(), 2.0);
  for (double t : {-0.1, -0.5, -3.0}) CHECK(I.loss_neg(t) == Approx(-std::log(-t)).epsilon(1e-9));
}

TEST_CASE("vig link reproduces the optimal discriminator") {
  Domain1D dom(-5, 5, 1000);
  auto P = gaussian_density(dom, 0.4, 0.9), Q = gaussian_density(dom, -0.3, 1.2);
  for (const auto& sig : {Signature::identity(), Signature::gan(), Signature::power_q(2.0)}) {
    auto prob = make_vig_problem(P, Q, sig);
    auto T = optimal_discriminator_grid(prob);
    for (int i = 0; i < dom.size(); i += 7) {
      const double qt = prob.escortQ.density[i];
      auto link = links::vig(sig, qt);
      CHECK(std::fabs(link(P[i] / (P[i] + qt)) - T[i]) <= 1e-8 * std::max(1.0, std::fabs(T[i])));
    }
  }
}

TEST_CASE("density ratio recovery") {
  CHECK(density_ratio_recover(links::sigmoid(), 0.0) == Approx(1.0));
  CHECK(density_ratio_recover(links::sigmoid(), std::log(3.0)) == Approx(3.0).epsilon(1e-14));
  CHECK(density_ratio_recover(links::vig(Signature::identity(), 1.0), -0.5) == Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(density_ratio_recover(links::vig(Signature::identity(), 1.0), 0.5), RangeError);
  CHECK_THROWS_AS(density_ratio_recover(links::identity(), 1.5), RangeError);

  Domain1D dom(-4, 4, 800);
  auto P = gaussian_density(dom, 0.5, 1.0), Q = gaussian_density(dom, 0.0, 1.3);
  for (const auto& L : {links::sigmoid(), links::matsushita(), links::canonical(divergences::kl())}) {
    auto T = bayes_discriminator(L, P, Q);
    for (int i = 0; i < dom.size(); i += 11)
      CHECK(density_ratio_recover(L, T[i]) == Approx(P[i] / Q[i]).epsilon(1e-6));
  }
}

TEST_CASE("variational half-divergence identity") {
  Domain1D dom(-6, 6, 600);
  std::vector<std::pair<GridFn, GridFn>> pairs = {
      {gaussian_density(dom, 0.0, 1.0), gaussian_density(dom, 1.0, 1.0)},
      {gaussian_density(dom, -0.5, 0.8), gaussian_density(dom, 0.3, 1.3)},
      {gaussian_density(dom, 0.0, 1.2), gaussian_density(dom, 0.2, 0.9)},
  };
  for (const auto& f : {divergences::kl(), divergences::gan()}) {
    for (const auto& L : {build_loss(f, links::canonical(f)), build_loss(f, links::sigmoid())}) {
      for (const auto& [P, Q] : pairs) {
        INFO(f.name << " " << L.link.name);
        const double If = f_divergence(f, P, Q);
        CHECK(std::fabs(min_expected_loss(L, P, Q) + 0.5 * If) <= 1e-5);
        CHECK(std::fabs(expected_loss(L, P, Q, bayes_discriminator(L.link, P, Q)) + 0.5 * If) <= 1e-5);
      }
    }
  }
}

TEST_CASE("derivative clamping") {
  auto kl = divergences::kl();
  CHECK(clamped_derivative(kl, 1.0) == Approx(1.0));
  CHECK(std::isfinite(clamped_derivative(kl, 0.0)));
  CHECK_THROWS_AS(clamped_derivative(kl, INFINITY), RangeError);
  CHECK(clamped_derivative(divergences::gan(), INFINITY) == 0.0);
}
