#include "handle_forge/root_find.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "handle_forge/error.hpp"

namespace handle_forge {

RootResult solve_monotone(const std::function<ValueSlope(double)>& f, double lo,
                          double hi, double target, double tol,
                          int max_iterations) {
  ValueSlope flo = f(lo);
  ValueSlope fhi = f(hi);
  if (flo.value == target) return {lo, 0.0, 0};
  if (fhi.value == target) return {hi, 0.0, 0};
  const bool increasing = fhi.value > flo.value;
  const double glo = flo.value - target;
  const double ghi = fhi.value - target;
  if (!(glo * ghi < 0.0)) {
    std::ostringstream os;
    os << "target " << target << " not bracketed by [" << flo.value << ", "
       << fhi.value << "]";
    fail(ErrorCode::OutOfRange, os.str());
  }

  // Invariant: g(a) has the sign of "below target", g(b) "above target".
  double a = lo;
  double b = hi;
  double t = 0.5 * (a + b);
  double best_t = std::abs(glo) < std::abs(ghi) ? lo : hi;
  double best_r = std::min(std::abs(glo), std::abs(ghi));
  double width_prev = std::abs(hi - lo);
  double width_prev2 = 2.0 * width_prev;

  for (int it = 1; it <= max_iterations; ++it) {
    const ValueSlope ft = f(t);
    const double g = ft.value - target;
    if (std::abs(g) < best_r) {
      best_r = std::abs(g);
      best_t = t;
    }
    if (std::abs(g) <= tol || g == 0.0) return {t, g, it};

    const bool below = increasing ? g < 0.0 : g > 0.0;
    if (below) {
      a = t;
    } else {
      b = t;
    }
    if (std::nextafter(a, b) == b || a == b) return {best_t, best_r, it};

    double next = std::numeric_limits<double>::quiet_NaN();
    const double lo_b = std::min(a, b);
    const double hi_b = std::max(a, b);
    const double width = hi_b - lo_b;
    // Newton is only trusted while it keeps halving the bracket every two steps.
    const bool newton_ok = width <= 0.5 * width_prev2;
    width_prev2 = width_prev;
    width_prev = width;
    if (newton_ok && std::isfinite(ft.slope) && ft.slope != 0.0) {
      next = t - g / ft.slope;
    }
    if (!(next > lo_b && next < hi_b)) {
      if (lo_b > 0.0 && hi_b / lo_b > 4.0) {
        next = std::sqrt(lo_b) * std::sqrt(hi_b);
      } else {
        next = 0.5 * (lo_b + hi_b);
      }
    }
    t = next;
  }
  return {best_t, best_r, max_iterations};
}

}  // namespace handle_forge
