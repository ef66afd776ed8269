#pragma once

#include <functional>

namespace vig::num {

// Floors used throughout: chi values in improper integrands, densities in ratios.
inline constexpr double kChiFloor = 1e-300;
inline constexpr double kDensityFloor = 1e-300;
inline constexpr double kDivergenceCap = 1e12;

using Fn = std::function<double(double)>;

// Adaptive Simpson on [a, b]; a > b flips the sign as usual.
double simpson(const Fn& f, double a, double b, double tol = 1e-10, int max_depth = 40);

// Smallest x in [lo, hi] with pred(x) true, assuming pred is monotone false->true.
double bisect_first(const std::function<bool(double)>& pred, double lo, double hi,
                    double rel_tol = 1e-15, int max_iter = 400);

// Root of an increasing function g on [lo, hi] with g(lo) <= 0 <= g(hi).
double bisect_root(const Fn& g, double lo, double hi, double rel_tol = 1e-15,
                   int max_iter = 400);

// Maximizer of a unimodal function on [lo, hi].
double golden_max(const Fn& f, double lo, double hi, double tol = 1e-12, int max_iter = 500);

inline double golden_min(const Fn& f, double lo, double hi, double tol = 1e-12) {
  return golden_max([&](double x) { return -f(x); }, lo, hi, tol);
}

// Central difference with step h * max(1, |x|).
double central_diff(const Fn& f, double x, double h = 1e-6);

}  // namespace vig::num
