#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace handle_forge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Closed-form shapes a profile segment can take. Every segment evaluates as
/// `raw(t) + shift`, with exact first and second derivatives of `raw`.
///
/// coeffs layout per kind:
///   Constant            [c]
///   Polynomial          [t_ref, c0, c1, ...]          sum c_i (t - t_ref)^i
///   SqrtQuadratic       [lambda, a, scale]            scale * sqrt(lambda t^2 + a)
///   SqrtQuadraticSlope  [lambda, a, scale]            scale * lambda t / sqrt(lambda t^2 + a)
///   LogSlope            [alpha, beta]                 alpha + beta log t
///   LogIntegral         [alpha, beta]                 alpha t + beta (t log t - t)
///   InvSqrtSlope        [sigma, k]                    k / sqrt(t - sigma)
///   SqrtIntegral        [sigma, k]                    2 k sqrt(t - sigma)
///   CapMiddle           [delta, mu, t0]               delta t + mu (sqrt t - sqrt t0)^2
///   Inverse             []        parts[0] = forward monotone segment; value solves forward(value) = t
///   ThetaOfF            []        parts[0] = f segment;  value f(sqrt s)^2
///   FOfTheta            []        parts[0] = theta segment; value sqrt(theta(t^2))
///   Scaled              [sx, sy]  parts[0];              value sy * part(t / sx)
///   Mollified           [b, w, slope_jump, curvature_jump, offset?]
///                                 parts[0] left of b, parts[1] right of b, window [b - w, b + w];
///                                 a quintic blend of the one-sided second derivatives
///                                 integrated from b - w, plus the optional constant offset
enum class SegmentKind {
  Constant,
  Polynomial,
  SqrtQuadratic,
  SqrtQuadraticSlope,
  LogSlope,
  LogIntegral,
  InvSqrtSlope,
  SqrtIntegral,
  CapMiddle,
  Inverse,
  ThetaOfF,
  FOfTheta,
  Scaled,
  Mollified,
};

std::string_view to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(std::string_view name);

enum class Continuity { C0, C1, C1PiecewiseC2, C2 };

std::string_view to_string(Continuity c);
Continuity continuity_from_string(std::string_view name);

/// Value with its first two derivatives at one point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct Segment {
  SegmentKind kind = SegmentKind::Constant;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;
  std::vector<Segment> parts;
  double shift = 0.0;

  /// Exact jet of this segment at t (t is not range-checked; analytic
  /// continuation is used where the formula allows it).
  Jet jet(double t) const;
  double value(double t) const { return jet(t).value; }
};

enum class Side { Left, Right };

/// Piecewise radial profile on [domain_lo, domain_hi]; domain_hi may be +inf.
/// Immutable after construction; evaluation is thread-safe.
class RadialProfile {
 public:
  RadialProfile() = default;
  /// Validates that segments partition [lo, hi] with strictly increasing
  /// breakpoints; throws InvalidArgument otherwise.
  RadialProfile(std::vector<Segment> segments, Continuity continuity);

  double domain_lo() const { return segments_.front().lo; }
  double domain_hi() const { return segments_.back().hi; }
  Continuity continuity() const { return continuity_; }
  std::span<const Segment> segments() const { return segments_; }

  /// Interior breakpoints (segment boundaries strictly inside the domain).
  std::vector<double> breakpoints() const;
  bool is_breakpoint(double t) const;

  /// Index of the segment owning t from the requested side. Throws OutOfDomain.
  std::size_t segment_index(double t, Side side = Side::Right) const;

  /// One-sided jet. At a breakpoint, Side::Left evaluates the segment ending there.
  Jet jet(double t, Side side = Side::Right) const;
  double value(double t) const { return jet(t).value; }

 private:
  std::vector<Segment> segments_;
  Continuity continuity_ = Continuity::C0;
};

/// Result of `eval`: equal entries away from breakpoints, the (left, right)
/// one-sided limits where the requested derivative may jump.
struct Evaluation {
  double left;
  double right;
  bool split;
};

/// Evaluates derivative `order` (0, 1 or 2) of p at t. Throws OutOfDomain.
Evaluation eval(const RadialProfile& p, double t, int order);

// --- constructors ---------------------------------------------------------

/// g(t) = sqrt(lambda t^2 + a) on {t >= 0 : lambda t^2 + a > 0}.
RadialProfile sqrt_quadratic(double lambda, double a);

RadialProfile constant_profile(double c, double lo = 0.0, double hi = kInf);

/// Natural cubic spline through (xs, ys); C2.
RadialProfile cubic_spline(std::span<const double> xs, std::span<const double> ys);

/// Piecewise quintic Hermite interpolant matching value, first and second
/// derivative at each knot; C2.
RadialProfile quintic_hermite(std::span<const double> xs, std::span<const Jet> jets);

/// Antiderivative F of fprime with F(anchor_t) = anchor_value; F' = fprime
/// exactly, continuity upgraded by one class. Throws IntegrationError for
/// segment kinds without a closed-form antiderivative.
RadialProfile integrate_derivative(const RadialProfile& fprime, double anchor_t,
                                   double anchor_value);

struct InverseValue {
  double t;
  /// 1 / p'(t); 0 where p' is infinite.
  double derivative;
};

/// Solves p(t) = u for strictly monotone p. Default tol is 1e-12 max(1, |u|).
/// Throws OutOfRange or NotMonotone.
InverseValue invert_monotone(const RadialProfile& p, double u,
                             std::optional<double> tol = std::nullopt);

/// theta(s) = f(sqrt s)^2 with transported derivatives. Throws NotPositive.
RadialProfile theta_of_f(const RadialProfile& f);
/// f(t) = sqrt(theta(t^2)). Throws NotPositive.
RadialProfile f_of_theta(const RadialProfile& theta);

/// The same profile on [lo, hi] intersected with its domain. Throws DomainEmpty.
RadialProfile restricted(const RadialProfile& p, double lo, double hi);

/// t -> sy * p(t / sx).
RadialProfile scaled(const RadialProfile& p, double sx, double sy);

/// Inverse profile of a strictly monotone segment on its image.
Segment inverse_segment(const Segment& forward);

/// Jet transport helpers shared with the Levi and inequality code.
Jet theta_jet_from_f(const Jet& f, double t);
Jet f_jet_from_theta(const Jet& theta, double t);

}  // namespace handle_forge
