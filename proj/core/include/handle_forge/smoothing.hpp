#pragma once

#include <optional>
#include <vector>

#include "handle_forge/profile.hpp"
#include "handle_forge/pseudoconvexity.hpp"

namespace handle_forge {

/// Which side of each window keeps its original values. Left: values and
/// slopes to the left are untouched and segments to the right absorb the
/// O(radius^2 * jump) value change. Right: the mirror image.
enum class Anchor { Left, Right };

struct SmoothingOptions {
  /// Uniform window radius. When unset, each breakpoint gets
  /// relative_radius * (smaller of its two adjacent segment lengths).
  std::optional<double> radius;
  double relative_radius = 1e-3;
  Anchor anchor = Anchor::Left;
};

struct SmoothingResult {
  RadialProfile profile;
  /// Breakpoints replaced by blend windows, with the radius used for each.
  std::vector<double> smoothed;
  std::vector<double> radii;
  /// Breakpoints left alone: non-finite one-sided jets, a value jump, or a
  /// window below double resolution.
  std::vector<double> skipped;
  /// Largest constant value offset applied outside the windows.
  double max_value_shift = 0.0;
};

/// Replaces the second derivative on (b - r, b + r) around every breakpoint
/// with a quintic blend between the one-sided limits (also absorbing any
/// first-derivative jump) and integrates twice from the anchored side.
/// Breakpoints where the profile is already C2 are kept as is.
/// Throws RadiusTooLarge when an explicit radius makes windows overlap or
/// swallow a segment.
SmoothingResult mollify_breakpoints(const RadialProfile& p, const SmoothingOptions& opts = {});

struct Certification {
  Classification classification;
  ClassKind expected = ClassKind::DMinusStrong;
  bool passed = false;
};

/// Grid sweep of one condition; passes when the classification equals
/// `expected` with a positive worst margin.
Certification reverify(const RadialProfile& p, Condition condition, ClassKind expected, double lo,
                       double hi, const GridOptions& grid = {});

struct SmoothedCertification {
  SmoothingResult smoothing;
  Certification before;
  Certification after;
  /// before.worst_margin - after.worst_margin (negative when smoothing helped).
  double margin_loss = 0.0;
  int halvings = 0;
  bool passed = false;
};

/// Smooths p, re-certifies on [lo, hi], and halves the radius up to
/// `max_halvings` times while the smoothed profile fails or loses more than
/// `max_relative_loss` of the unsmoothed worst margin.
SmoothedCertification smooth_and_certify(const RadialProfile& p, Condition condition,
                                         ClassKind expected, double lo, double hi,
                                         const GridOptions& grid = {},
                                         SmoothingOptions opts = {}, int max_halvings = 6,
                                         double max_relative_loss = 0.1);

}  // namespace handle_forge
