#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vigfgan/divergence.hpp"
#include "vigfgan/errors.hpp"
#include "vigfgan/numeric.hpp"

using namespace vig;
using doctest::Approx;

namespace {

std::vector<DivergenceSpec> shipped() {
  using namespace divergences;
  return {kl(), reverse_kl(), gan(), pearson(), neyman(), jensen_shannon()};
}

// Random pairs of Gaussian mixtures with overlapping support on [-10, 10].
std::vector<std::pair<GridFn, GridFn>> random_pairs(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> mu(-1.5, 1.5), sd(0.7, 1.4), w(0.2, 0.8);
  Domain1D dom(-10, 10, 4096);
  auto mix = [&] {
    const double a = w(rng), m1 = mu(rng), m2 = mu(rng), s1 = sd(rng), s2 = sd(rng);
    auto g1 = gaussian_density(dom, m1, s1), g2 = gaussian_density(dom, m2, s2);
    return pointwise(g1, g2, [a](double x, double y) { return a * x + (1 - a) * y; });
  };
  std::vector<std::pair<GridFn, GridFn>> out;
  for (int i = 0; i < count; ++i) {
    auto p = mix();
    auto q = mix();
    out.emplace_back(std::move(p), std::move(q));
  }
  return out;
}

}  // namespace

TEST_CASE("generators vanish at one and are convex") {
  for (const auto& s : shipped()) {
    INFO(s.name);
    CHECK(std::fabs(s.f(1.0)) <= 1e-12);
    CHECK(std::fabs(s.csiszar(1.0)) <= 1e-12);
    double prev = -INFINITY;
    for (double z = 1e-3; z < 50; z *= 1.1) {
      CHECK(s.xi(z) >= prev);
      prev = s.xi(z);
      CHECK(s.xi(z) == Approx(num::central_diff(s.f, z, 1e-7)).epsilon(1e-5));
    }
  }
}

TEST_CASE("closed-form conjugates match the numeric conjugate") {
  for (const auto& s : shipped()) {
    for (double t : {-3.0, -1.0, -0.3, -0.01}) {
      INFO(s.name << " t=" << t);
      const double c = s.conj(t);
      if (!std::isfinite(c)) continue;
      CHECK(c == Approx(numeric_conjugate(s, t)).epsilon(1e-7).scale(1.0));
    }
  }
  CHECK(divergences::kl().conj(0.5) == Approx(numeric_conjugate(divergences::kl(), 0.5)).epsilon(1e-8));
  CHECK(divergences::pearson().conj(2.0) == Approx(3.0).epsilon(1e-12));
  CHECK(std::isinf(divergences::gan().conj(0.1)));
}

TEST_CASE("f-divergence examples") {
  Domain1D dom(-8, 9, 8192);
  auto P = gaussian_density(dom, 0, 1), Q = gaussian_density(dom, 1, 1);
  CHECK(f_divergence(divergences::kl(), P, Q) == Approx(0.5).epsilon(1e-9));
  CHECK(std::fabs(f_divergence(divergences::kl(), P, P)) <= 1e-12);
  CHECK(std::fabs(f_divergence(divergences::gan(), P, P)) <= 1e-12);
  CHECK(kl_chi(Signature::identity(), P, Q) == Approx(0.5).epsilon(1e-9));
  CHECK(std::fabs(kl_chi(Signature::power_q(2.0), P, P)) <= 1e-12);

  Domain1D wide(-20, 20, 8192);
  auto A = gaussian_density(wide, 0, 1), B = gaussian_density(wide, 0, std::sqrt(2.0));
  CHECK(f_divergence(divergences::kl(), A, B) == Approx(0.5 * (std::log(2.0) - 0.5)).epsilon(1e-9));
}

TEST_CASE("divergent integral is reported") {
  Domain1D dom(-1, 1, 256);
  auto P = uniform_density(dom, -1, 1);
  auto Q = GridFn::sample(dom, [](double x) { return x < 0 ? 1.0 : 1e-200; });
  CHECK_THROWS_AS(f_divergence(divergences::pearson(), P, Q), DivergentIntegral);
}

TEST_CASE("kl_chi equals the f-divergence of -log_chi") {
  for (const auto& sig : {Signature::power_q(2.0), Signature::gan(), Signature::power_q(0.5)}) {
    auto spec = divergences::from_signature(sig);
    for (auto& [P, Q] : random_pairs(3, 11)) {
      INFO(sig.name());
      CHECK(kl_chi(sig, P, Q) == Approx(f_divergence(spec, Q, P)).epsilon(1e-8));
    }
  }
}

TEST_CASE("chi_gan realizes the GAN f-divergence") {
  for (auto& [P, Q] : random_pairs(4, 3))
    CHECK(kl_chi(Signature::gan(), Q, P) == Approx(f_divergence(divergences::gan(), P, Q)).epsilon(1e-8));
}

TEST_CASE("scaled KL_chi") {
  auto pairs = random_pairs(2, 5);
  auto& [P, Q] = pairs[0];
  auto one = GridFn::sample(P.dom, [](double) { return 1.0; });
  auto sig = Signature::power_q(2.0);
  CHECK(kl_chi_scaled(sig, one, P, Q) == Approx(kl_chi(sig, P, Q)).epsilon(1e-12));
  CHECK(kl_chi_scaled(Signature::identity(), P, P, Q) == Approx(kl_chi(Signature::identity(), P, Q)).epsilon(1e-10));
}

TEST_CASE("Csiszar duality, affine invariance, non-negativity") {
  auto pairs = random_pairs(10, 7);
  for (const auto& s : shipped()) {
    auto dual = divergences::csiszar_dual(s);
    auto aff = divergences::affine(s, 1.7);
    for (auto& [P, Q] : pairs) {
      INFO(s.name);
      const double d = f_divergence(s, P, Q);
      CHECK(d >= -1e-10);
      CHECK(d == Approx(f_divergence(dual, Q, P)).epsilon(1e-8));
      CHECK(d == Approx(f_divergence(aff, P, Q)).epsilon(1e-8));
    }
  }
}

TEST_CASE("chi_from_f soundness") {
  auto pairs = random_pairs(5, 19);
  const std::vector<std::pair<DivergenceSpec, double>> accepted = {
      {divergences::gan(), 0.0},
      {divergences::reverse_kl(), 0.0},
      {divergences::neyman(), 1.0},
      {divergences::jensen_shannon(), 0.5 * std::log(2.0)}};
  for (const auto& [spec, M] : accepted) {
    auto sig = chi_from_f(spec, M, 1e-3);
    CHECK(is_nondecreasing(sig, 0.0, 100.0));
    for (auto& [P, Q] : pairs) {
      INFO(spec.name);
      CHECK(std::fabs(kl_chi(sig, Q, P) - f_divergence(spec, P, Q)) <= 1e-6);
    }
  }
  CHECK_THROWS_AS(chi_from_f(divergences::pearson(), 10.0, 1e-3), SubgradientUnbounded);
  CHECK_THROWS_AS(chi_from_f(divergences::kl(), 5.0, 1e-3), SubgradientUnbounded);
  CHECK_NOTHROW(chi_from_f(divergences::csiszar_dual(divergences::pearson()), 1.0, 1e-3));
}

TEST_CASE("chi_from_f on the GAN and reverse-KL generators") {
  const double eps = 1e-2;
  auto sig = chi_from_f(divergences::gan(), 0.0, eps);
  auto ref = damped(Signature::gan(), eps);
  for (double z : {1e-4, 0.01, 0.3, 1.0, 4.0, 100.0}) {
    CHECK(sig(z) == Approx(ref(z)).epsilon(1e-12));
    CHECK(log_chi(sig, z) == Approx(log_chi(Signature::gan(), z) + eps * (z - 1)).epsilon(1e-9));
  }
  auto rk = chi_from_f(divergences::reverse_kl(), 0.0, 1e-9);
  for (double t : {0.01, 1.0, 10.0}) CHECK(rk(t) == Approx(t).epsilon(1e-6));
  CHECK(rk.inverse(rk(2.0)) == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("truncated construction sandwiches KL") {
  // Q = U[0,1], P = 4x^3: ratio P/Q = 4x^3 <= 4, KL(P||Q) = log 4 - 3/4.
  Domain1D dom(0, 1, 8192);
  auto Q = uniform_density(dom, 0, 1);
  auto P = GridFn::sample(dom, [](double x) { return 4 * x * x * x; });
  const auto kl = divergences::kl();
  const double exact = std::log(4.0) - 0.75;
  CHECK(f_divergence(kl, P, Q) == Approx(exact).epsilon(1e-10));

  auto above = chi_from_f_truncated(kl, 4.5, 1e-3, 4.0);
  CHECK(above.remainder_bound == 0.0);
  CHECK(kl_chi(above.sig, Q, P) == Approx(exact).epsilon(1e-9));

  auto t39 = chi_from_f_truncated(kl, 3.9, 1e-3, 4.0);
  CHECK(t39.remainder_bound == Approx(4 * std::log(4.0) - 3.9 * std::log(3.9)).epsilon(1e-12));
  const double lo = kl_chi(t39.sig, Q, P);
  CHECK(lo <= exact + 1e-12);
  CHECK(exact <= lo + t39.remainder_bound + 1e-12);

  double prev_rem = INFINITY, prev_gap = INFINITY;
  for (double ts : {1.5, 2.0, 2.5, 3.0, 3.5, 3.9, 4.0}) {
    auto tr = chi_from_f_truncated(kl, ts, 1e-3, 4.0);
    const double v = kl_chi(tr.sig, Q, P);
    INFO("t*=" << ts);
    CHECK(v <= exact + 1e-12);
    CHECK(exact <= v + tr.remainder_bound + 1e-12);
    CHECK(tr.remainder_bound <= prev_rem);
    CHECK(exact - v <= prev_gap + 1e-12);
    prev_rem = tr.remainder_bound;
    prev_gap = exact - v;
  }
  CHECK(prev_rem == 0.0);
}

TEST_CASE("Bregman basics") {
  auto sq = half_squared_norm();
  CHECK(bregman(sq, {1.0, 0.0}, {0.0, 0.0}) == Approx(0.5));
  CHECK(bregman(sq, {0.3, -2.0}, {0.3, -2.0}) == 0.0);
  CHECK_THROWS_AS(bregman(sq, {1.0}, {0.0, 0.0}), DomainError);
  std::mt19937 rng(1);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 1000; ++i) CHECK(bregman(sq, {n01(rng), n01(rng)}, {n01(rng), n01(rng)}) >= 0.0);
}

TEST_CASE("KL equals the cumulant Bregman divergence") {
  auto r = theorem1_check(phi_quadratic(), {0.0, -0.5}, {1.0, -0.5}, Domain1D(-8, 9, 8192));
  CHECK(r.kl == Approx(0.5).epsilon(1e-8));
  CHECK(std::fabs(r.kl - r.bregman) <= 1e-6);
  auto same = theorem1_check(phi_quadratic(), {0.2, -0.7}, {0.2, -0.7}, Domain1D(-8, 8));
  CHECK(std::fabs(same.kl) <= 1e-12);
  CHECK(std::fabs(same.bregman) <= 1e-8);
  auto r2 = theorem1_check(phi_quadratic(), {0.0, -0.5}, {0.0, -0.25}, Domain1D(-20, 20, 8192));
  CHECK(r2.kl == Approx(0.0965735).epsilon(1e-6));
  CHECK(std::fabs(r2.kl - r2.bregman) <= 1e-6);
}

TEST_CASE("generalized identity across families") {
  Domain1D dom(-2, 2, 4096);
  Phi cube = [](double x) { return std::vector<double>{x * x * x}; };
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const double tp = u(rng), tq = u(rng);
    auto r = generalized_theorem1_check(phi_linear(), {tp}, cube, {tq}, dom);
    CHECK(std::fabs(r.kl - (r.d_param + r.d_cumulant)) <= 1e-5);
    auto s = generalized_theorem1_check(cube, {tq}, phi_linear(), {tp}, dom);
    CHECK(std::fabs(s.kl - (s.d_param + s.d_cumulant)) <= 1e-5);
  }
  auto same = generalized_theorem1_check(phi_linear(), {0.3}, phi_linear(), {-0.4}, dom);
  CHECK(std::fabs(same.d_cumulant) <= 1e-12);
}

TEST_CASE("damping leaves KL_chi unchanged") {
  Domain1D dom(-10, 10, 4096);
  auto P = gaussian_density(dom, 0, 1), Q = gaussian_density(dom, 0.8, 1.3);
  CHECK(lemma1_invariance_check(Signature::gan(), {0.0}, P, Q) == 0.0);
  CHECK(lemma1_invariance_check(Signature::gan(), {0.5, 1.0, 10.0}, P, Q) <= 1e-7);
  CHECK(lemma1_invariance_check(Signature::power_q(2.0), {100.0}, P, Q) <= 1e-7);
  CHECK(lemma1_invariance_check(Signature::identity(), {0.5, 1.0, 10.0, 100.0}, P, Q) <= 1e-7);
  CHECK_THROWS_AS(lemma1_invariance_check(Signature::gan(), {-1.0}, P, Q), DomainError);
}
