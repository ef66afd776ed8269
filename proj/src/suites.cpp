#include "vigfgan/suites.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "vigfgan/divergence.hpp"
#include "vigfgan/errors.hpp"
#include "vigfgan/generator.hpp"
#include "vigfgan/toy_gan.hpp"
#include "vigfgan/utility.hpp"
#include "vigfgan/vig.hpp"

namespace vig {

namespace {

CheckRow row(std::string suite, double value, double reference, double gap, double tol) {
  return {std::move(suite), value, reference, gap, tol, std::isfinite(gap) && gap <= tol};
}

CheckRow theorem1() {
  // N(0,1) vs N(1,1) at natural parameters (mu, -1/2)
  const auto r = theorem1_check(phi_quadratic(), {0.0, -0.5}, {1.0, -0.5}, Domain1D(-8, 9, 8192));
  return row("theorem1", r.kl, r.bregman, std::max(std::fabs(r.kl - r.bregman), std::fabs(r.kl - 0.5)), 1e-6);
}

CheckRow vig_identity() {
  const auto r = vig_identity_check(Signature::power_q(2.0), phi_linear(), {1.0}, {0.5}, Domain1D(-3, 3));
  const double rel = std::fabs(r.gap) / std::max(1.0, std::fabs(r.rhs));
  const double cross = std::fabs(r.escort_form - (r.lhs - r.J));
  auto out = row("vig_identity", r.lhs, r.rhs, rel, 1e-3);
  out.pass = out.pass && cross <= 1e-6;
  return out;
}

CheckRow theorem3() {
  Domain1D dom(-6, 6, 2048);
  auto P = gaussian_density(dom, 0.5, 0.9), Q = gaussian_density(dom, -0.2, 1.3);
  double worst = 0.0, lhs0 = 0.0, rhs0 = 0.0;
  bool first = true;
  for (const auto& sig : {Signature::power_q(2.0), Signature::gan(), Signature::mu_relu_chi(0.5)}) {
    auto prob = make_vig_problem(P, Q, sig);
    const double lhs = escort_log_gap(prob);
    const double rhs = kl_chi_scaled(sig, prob.escortQ.density, prob.escortQ.density, P) - penalty_J(Q, sig);
    if (first) lhs0 = lhs, rhs0 = rhs, first = false;
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return row("theorem3", lhs0, rhs0, worst, 1e-6);
}

CheckRow gan_bridge() {
  Domain1D dom(-10, 10, 4096);
  const double means[][4] = {{0, 1, 0.5, 1}, {0, 1, -1, 1.3}, {0.3, 0.8, 0.1, 1.1}, {-0.5, 1.2, 0.7, 0.9},
                             {1, 1, -1, 1}};
  double worst = 0.0, a0 = 0.0, b0 = 0.0;
  for (int i = 0; i < 5; ++i) {
    auto P = gaussian_density(dom, means[i][0], means[i][1]), Q = gaussian_density(dom, means[i][2], means[i][3]);
    const double a = f_divergence(divergences::gan(), P, Q), b = kl_chi(Signature::gan(), Q, P);
    if (i == 0) a0 = a, b0 = b;
    worst = std::max(worst, std::fabs(a - b));
  }
  return row("gan_bridge", a0, b0, worst, 1e-6);
}

CheckRow lemma1() {
  Domain1D dom(-10, 10, 4096);
  auto P = gaussian_density(dom, 0, 1), Q = gaussian_density(dom, 0.8, 1.3);
  const double base = kl_chi(Signature::gan(), P, Q);
  const double gap = lemma1_invariance_check(Signature::gan(), {0.0, 0.5, 1.0, 10.0, 100.0}, P, Q);
  return row("lemma1", base, base, gap, 1e-7);
}

CheckRow sandwich() {
  Domain1D dom(0, 1, 8192);
  auto Q = uniform_density(dom, 0, 1);
  auto P = GridFn::sample(dom, [](double x) { return 4 * x * x * x; });
  const auto kl = divergences::kl();
  const double exact = f_divergence(kl, P, Q);
  double worst = 0.0, prev_gap = INFINITY, lo0 = 0.0;
  bool monotone = true;
  for (double ts : {1.5, 2.0, 2.5, 3.0, 3.5, 3.9, 4.0}) {
    const auto tr = chi_from_f_truncated(kl, ts, 1e-3, 4.0);
    const double lo = kl_chi(tr.sig, Q, P);
    if (ts == 1.5) lo0 = lo;
    worst = std::max({worst, lo - exact, exact - (lo + tr.remainder_bound)});
    monotone = monotone && exact - lo <= prev_gap + 1e-12;
    prev_gap = exact - lo;
  }
  return row("sandwich", lo0, exact, monotone ? std::max(worst, 0.0) : INFINITY, 1e-12);
}

CheckRow half_gaussian_scaling() {
  const double A = 15.0 * std::sqrt(2.0) / 32.0;
  std::vector<double> J;
  for (double s : {1.0, 4.0, 9.0})
    J.push_back(penalty_J(half_gaussian_density(Domain1D(-s, s, 16384), s, A), Signature::power_q(0.5)));
  const double gap = std::max(std::fabs(J[0] / J[1] / 2.0 - 1.0), std::fabs(J[0] / J[2] / 3.0 - 1.0));
  return row("half_gaussian_scaling", J[0] / J[1], 2.0, gap, 1e-2);
}

std::string b2s(bool b) { return b ? "true" : "false"; }

std::string opt_str(const std::optional<double>& v) { return v ? fmt_double(*v) : ""; }

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"theorem1", "vig_identity", "theorem3", "gan_bridge",
                                                 "lemma1",   "sandwich",     "half_gaussian_scaling"};
  return names;
}

CheckRow run_verify_suite(const std::string& name) {
  if (name == "theorem1") return theorem1();
  if (name == "vig_identity") return vig_identity();
  if (name == "theorem3") return theorem3();
  if (name == "gan_bridge") return gan_bridge();
  if (name == "lemma1") return lemma1();
  if (name == "sandwich") return sandwich();
  if (name == "half_gaussian_scaling") return half_gaussian_scaling();
  throw DomainError("unknown verify suite: " + name);
}

std::string verify_csv(const std::vector<CheckRow>& rows) {
  std::ostringstream os;
  os << "suite,value,reference,gap,tolerance,pass\n";
  for (const auto& r : rows)
    os << r.suite << ',' << fmt_double(r.value) << ',' << fmt_double(r.reference) << ',' << fmt_double(r.gap) << ','
       << fmt_double(r.tolerance) << ',' << b2s(r.pass) << '\n';
  return os.str();
}

std::vector<GridFn> random_mixtures(int count, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::uniform_real_distribution<double> mu(-1.0, 1.0), sd(0.1, 1.5), w(0.2, 0.8);
  Domain1D dom(-6, 6, 4096);
  std::vector<GridFn> out;
  for (int i = 0; i < count; ++i) {
    auto g1 = gaussian_density(dom, mu(rng), sd(rng)), g2 = gaussian_density(dom, mu(rng), sd(rng));
    const double a = w(rng);
    out.push_back(pointwise(g1, g2, [a](double x, double y) { return a * x + (1 - a) * y; }));
  }
  return out;
}

const std::vector<std::string>& bounds_class_names() {
  static const std::vector<std::string> names = {"gan", "mu_relu", "elu", "power_q", "half_gaussian", "elu_uniform"};
  return names;
}

BoundsTable bounds_table(const BoundsOptions& opts) {
  for (const auto& c : opts.classes)
    if (!has(bounds_class_names(), c)) throw DomainError("unknown bounds class: " + c);
  BoundsTable t;
  std::ostringstream os;
  os << "class,param,density,J,Z,bound,holds,H_star,measure_small\n";
  auto emit = [&](const std::string& cls, double param, const std::string& density, const PenaltyReport& r) {
    os << cls << ',' << fmt_double(param) << ',' << density << ',' << fmt_double(r.J) << ',' << fmt_double(r.Z) << ','
       << fmt_double(r.bound) << ',' << b2s(r.holds) << ',' << opt_str(r.H_star) << ',' << opt_str(r.measure_small)
       << '\n';
    ++t.rows;
    t.violations += !r.holds;
  };
  const bool random_needed = has(opts.classes, "gan") || has(opts.classes, "mu_relu") || has(opts.classes, "elu") ||
                             has(opts.classes, "power_q");
  const auto dens = random_needed ? random_mixtures(opts.densities, opts.seed) : std::vector<GridFn>{};
  auto sweep = [&](const std::string& cls, const std::vector<double>& params, auto make) {
    if (!has(opts.classes, cls)) return;
    for (double p : params)
      for (size_t i = 0; i < dens.size(); ++i) emit(cls, p, "mixture_" + std::to_string(i), penalty_bound(dens[i], make(p)));
  };
  sweep("gan", {0.0}, [](double) { return PenaltySpec::gan(); });
  sweep("mu_relu", opts.mu, [](double m) { return PenaltySpec::mu_relu(m); });
  sweep("elu", opts.gamma, [](double g) { return PenaltySpec::elu(g); });
  sweep("power_q", opts.q, [](double q) { return PenaltySpec::power_q(q); });
  if (has(opts.classes, "half_gaussian")) {
    const double A = 15.0 * std::sqrt(2.0) / 32.0;
    for (double s : opts.sigma)
      emit("half_gaussian", s, "half_gaussian",
           penalty_bound(half_gaussian_density(Domain1D(-s, s, 16384), s, A), PenaltySpec::half_gaussian(s)));
  }
  if (has(opts.classes, "elu_uniform")) {
    Domain1D dom(0.25, 1.25, 1024);
    emit("elu_uniform", 1.0, "uniform", penalty_bound(uniform_density(dom, 0.25, 1.25), PenaltySpec::elu(1.0)));
  }
  t.csv = os.str();
  return t;
}

FactorizeTable factorize_table(const FactorizeOptions& opts) {
  FactorizeTable t;
  std::ostringstream os;
  os << "d,L,activation,net,point,q_jacobian,q_factorized,gap\n";
  std::mt19937_64 rng(opts.seed);
  for (int d : opts.dims) {
    if (d < 1 || d > 3) throw DomainError("factorize supports d in 1..3");
    const auto in = uniform_box(d);
    const int n = d == 1 ? 401 : (d == 2 ? 61 : 21);
    std::uniform_real_distribution<double> U(-0.98, 0.98);
    for (int L : opts.depths)
      for (const auto& act : opts.activations)
        for (int r = 0; r < opts.nets; ++r) {
          NetSpec spec{d, L, act, 0.5, r % 2 ? "softplus" : "identity",
                       opts.seed * 100000 + static_cast<std::uint64_t>(1000 * d + 100 * L + r)};
          const auto net = normalize_biases(random_net(spec), in, n);
          const auto units = unit_escorts(net, in, n);
          for (int k = 0; k < opts.points; ++k) {
            Vec x(d);
            for (int i = 0; i < d; ++i) x[i] = U(rng);
            const Vec z = net.forward(x);
            const double qj = density_via_jacobian(net, in, z);
            const double qf = density_via_factorization(net, in, z, units).q_g;
            const double gap = std::fabs(qf - qj) / std::max(std::fabs(qj), 1e-300);
            os << d << ',' << L << ',' << act << ',' << r << ',' << k << ',' << fmt_double(qj) << ','
               << fmt_double(qf) << ',' << fmt_double(gap) << '\n';
            ++t.rows;
            t.max_gap = std::max(t.max_gap, gap);
          }
        }
  }
  t.csv = os.str();
  return t;
}

Signature signature_by_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.empty()) throw DomainError("empty signature spec");
  auto num = [&](size_t i) {
    if (i >= parts.size()) throw DomainError("signature " + spec + " needs a parameter");
    size_t used = 0;
    const double v = std::stod(parts[i], &used);
    if (used != parts[i].size()) throw DomainError("bad number in signature spec: " + spec);
    return v;
  };
  const auto& k = parts[0];
  if (k == "identity") return Signature::identity();
  if (k == "gan") return Signature::gan();
  if (k == "softplus") return Signature::softplus_chi();
  if (k == "lsu") return Signature::lsu_chi();
  if (k == "power_q") return Signature::power_q(num(1));
  if (k == "mu_relu") return Signature::mu_relu_chi(num(1));
  if (k == "elu") return Signature::elu_chi(num(1), num(2));
  throw DomainError("unknown signature: " + spec);
}

GameTable game_table(const GameOptions& opts) {
  GameTable t;
  std::ostringstream os;
  os << "sig,q,z,a,r\n";
  for (const auto& s : opts.signatures) {
    const auto sig = signature_by_spec(s);
    for (double q : opts.q) {
      const auto u = make_utility(sig, q);
      for (double z : opts.z) {
        double a = NAN, r = NAN;
        try {
          a = absolute_risk_aversion(u, z);
          r = relative_risk_aversion(u, z);
        } catch (const Error&) {
        }
        if (!std::isfinite(a) || !std::isfinite(r)) {
          ++t.skipped;
          continue;
        }
        os << s << ',' << fmt_double(q) << ',' << fmt_double(z) << ',' << fmt_double(a) << ',' << fmt_double(r) << '\n';
        ++t.rows;
      }
    }
  }
  t.csv = os.str();
  return t;
}

}  // namespace vig
