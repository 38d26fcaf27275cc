#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "handle_forge/profile.hpp"

namespace handle_forge {

/// StrictHolds: the D- system holds strictly (both margins positive).
/// ReverseHolds: the reversed (D+) system holds strictly.
/// Equality: some margin lies inside the tolerance band, none has the wrong sign.
/// Violated: margins of opposite sign, or a non-finite quantity.
enum class Verdict { StrictHolds, ReverseHolds, Equality, Violated };
std::string_view to_string(Verdict v);

/// One inequality lhs < rhs with margin = rhs - lhs.
struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct SidedReport {
  Inequality first;
  Inequality second;
  /// ODE residual; zero on the weakly pseudoconvex boundary case.
  double residual = 0.0;
  Verdict verdict = Verdict::Violated;
};

/// Report at one abscissa. At a breakpoint both one-sided limits are
/// evaluated and `verdict` combines them; elsewhere left == right.
struct ConditionReport {
  double t = 0.0;
  bool split = false;
  SidedReport left;
  SidedReport right;
  Verdict verdict = Verdict::Violated;
};

/// Strictness threshold: |margin| <= kStrictTolerance * max(1, |lhs|, |rhs|) is Equality.
inline constexpr double kStrictTolerance = 1e-12;

Verdict classify_margins(const Inequality& a, const Inequality& b,
                         double tol = kStrictTolerance);

/// theta-form: theta' < 1 and 2 s theta theta'' < (1 - theta')(s theta'^2 + theta);
/// residual 2 s theta theta'' - (1 - theta')(s theta'^2 + theta). Throws NotPositive.
SidedReport theta_report(const Jet& theta, double s, double tol = kStrictTolerance);
ConditionReport theta_condition(const RadialProfile& theta, double s,
                                double tol = kStrictTolerance);

/// f-form: f f'/t < 1 and f (f'' + f'^3 / t) < 1; residual f (f'' + f'^3/t) - 1.
/// t = 0 throws OutOfDomain; f <= 0 throws NotPositive.
SidedReport f_report(const Jet& f, double t, double tol = kStrictTolerance);
ConditionReport f_condition(const RadialProfile& f, double t, double tol = kStrictTolerance);

/// Cap bounds for the quadratic model: h' < bound and 2 t h'' + h' < bound.
SidedReport cap_report(const Jet& h, double t, double bound, double tol = kStrictTolerance);

enum class Condition { Theta, FForm, Cap };

struct GridOptions {
  std::size_t n_grid = 1000;
  bool include_lo = true;
  bool include_hi = true;
  double tol = kStrictTolerance;
  /// Upper bound for Condition::Cap.
  double cap_bound = 0.0;
  /// Keep every per-point report in the result.
  bool keep_reports = false;
};

/// Uniform points, geometric points when lo > 0 spans more than a decade,
/// ten points clustering at each end (relative to the interval and, for
/// lo > 0, relative to lo), and every breakpoint inside [lo, hi].
std::vector<double> certification_grid(const RadialProfile& p, double lo, double hi,
                                       const GridOptions& opts);

enum class ClassKind { DMinusStrong, DPlusStrong, Mixed, BoundaryCase };
std::string_view to_string(ClassKind k);

struct Classification {
  ClassKind kind = ClassKind::Mixed;
  /// Smallest margin toward the classified side (positive for a strict class);
  /// for Mixed/BoundaryCase the better of the two sides.
  double worst_margin = 0.0;
  double worst_t = 0.0;
  /// Smallest min(first, second) margin over all points and sides.
  double min_dminus_margin = 0.0;
  double min_dminus_t = 0.0;
  /// Smallest min(-first, -second) margin.
  double min_dplus_margin = 0.0;
  double min_dplus_t = 0.0;
  std::size_t points = 0;
  std::size_t breakpoints = 0;
  std::vector<ConditionReport> reports;
};

/// Evaluates one condition at t for profile p (theta-form for Theta, f-form
/// for FForm delegating t = 0 to the theta-form, cap bounds for Cap).
ConditionReport evaluate_condition(const RadialProfile& p, Condition c, double t,
                                   const GridOptions& opts);

/// Grid classification over [lo, hi] (grid evaluated in parallel).
Classification classify(const RadialProfile& p, Condition c, double lo, double hi,
                        const GridOptions& opts = {});

struct DualityReport {
  double s = 0.0;
  double u = 0.0;
  Verdict theta_verdict = Verdict::Violated;
  Verdict tau_verdict = Verdict::Violated;
  /// theta' > 0: strict <-> reverse swap; theta' < 0: verdicts equal.
  bool consistent = false;
};

/// Compares the theta condition at s with the theta condition for its local inverse tau at u = theta(s),
/// using tau' = 1/theta', tau'' = -theta''/theta'^3. Throws NotInvertible if theta' = 0.
DualityReport duality_check(const RadialProfile& theta, double s);

nlohmann::json to_json(const SidedReport& r);
nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const Classification& c);

/// Rows t,side,margin1,margin2 for every report.
void write_margin_csv(std::ostream& out, const std::vector<ConditionReport>& reports);

}  // namespace handle_forge
