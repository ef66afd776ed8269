#include "vigfgan/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace vig::num {

namespace {

double simpson_rec(const Fn& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Absolute tolerance, floored at roughly machine precision of the panel value.
  const double eff_tol = std::max(tol, 1e-15 * std::fabs(left + right));
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eff_tol || !std::isfinite(delta))
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double simpson(const Fn& f, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  if (a > b) return -simpson(f, b, a, tol, max_depth);
  // Seed with a coarse split so narrow features near the middle are not missed.
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == kPanels) ? b : a + (i + 1) * h;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_rec(f, lo, hi, fa, fm, fb, whole, tol / kPanels, max_depth);
  }
  return total;
}

double bisect_first(const std::function<bool(double)>& pred, double lo, double hi,
                    double rel_tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= rel_tol * std::max(std::fabs(lo), std::fabs(hi))) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double bisect_root(const Fn& g, double lo, double hi, double rel_tol, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= rel_tol * std::max(std::fabs(lo), std::fabs(hi))) break;
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double golden_max(const Fn& f, double lo, double hi, double tol, int max_iter) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol * std::max(1.0, std::fabs(a) + std::fabs(b));
       ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double central_diff(const Fn& f, double x, double h) {
  const double step = h * std::max(1.0, std::fabs(x));
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

}  // namespace vig::num
