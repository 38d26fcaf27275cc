#pragma once

#include <functional>

namespace handle_forge {

struct ValueSlope {
  double value;
  double slope;
};

struct RootResult {
  double t;
  double residual;
  int iterations;
};

/// Solves F(t) = target for F monotone on [lo, hi] with F(lo), F(hi) bracketing
/// the target. Bisection (geometric when the bracket spans decades above zero)
/// shrinks the bracket; Newton steps are taken whenever they stay inside it.
///
/// Terminates when |F(t) - target| <= tol or the bracket collapses to adjacent
/// doubles. Throws OutOfRange if the target is not bracketed.
RootResult solve_monotone(const std::function<ValueSlope(double)>& f, double lo,
                          double hi, double target, double tol,
                          int max_iterations = 400);

}  // namespace handle_forge
