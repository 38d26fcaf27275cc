#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "handle_forge/levi.hpp"
#include "handle_forge/profile.hpp"
#include "handle_forge/pseudoconvexity.hpp"
#include "handle_forge/smoothing.hpp"

namespace handle_forge {

// --- rotational handles -----------------------------------------------------

/// Smallest sigma the profiles are built with. When exp(log_sigma) is smaller,
/// the log piece is cut at 2 * kSigmaFloor and joined to the 1/sqrt piece at
/// the slope it has there, provided that slope is at least kMinJunctionSlope.
inline constexpr double kSigmaFloor = 1e-290;
inline constexpr double kMinJunctionSlope = 1.1;

struct OuterConstants {
  double lambda = 0.0;
  double a = 1.0;
  double eps = 0.0;
  double c = 0.0;
  double eta = 0.0;
  double c1 = 0.0;
  double log_sigma = 0.0;
  /// exp(log_sigma); 0 when it underflows.
  double sigma = 0.0;
  /// Slope magnitude where the 1/sqrt(t - sigma) piece takes over (2 unless clamped).
  double junction_slope = 2.0;
  /// sigma used by the profile: sigma itself, or kSigmaFloor when sigma underflows
  /// and a junction slope of at least kMinJunctionSlope reaches the floor; else 0.
  double sigma_effective = 0.0;
};

struct InnerConstants {
  double lambda = 0.0;
  double eps = 0.0;
  double k = 0.0;
  double c = 0.0;
  double eta = 0.0;
  double c1 = 0.0;
  double log_sigma = 0.0;
  double sigma = 0.0;
  double junction_slope = 2.0;
  double sigma_effective = 0.0;
};

/// Constants of the outer handle for g(t) = sqrt(lambda t^2 + a). Lengths are
/// computed at a = 1 on eps / sqrt(a) and scaled by sqrt(a); slopes c, c1 do
/// not depend on a. eta defaults to min(eps, c^3 / 3) / 2.
/// Throws NotStronglyPsh (lambda <= 1), InvalidArgument (a, eps <= 0),
/// EpsilonTooLarge (c1 >= 2 or eta >= eps).
OuterConstants derive_constants_outer(double lambda, double eps, double a = 1.0,
                                      std::optional<double> eta = std::nullopt);

/// Constants of the inner handle for g(t) = sqrt(lambda t^2 + 1).
/// k = (lambda / g(eps) + 1) / 2; eta from a halving search starting at
/// min(eps, 1) / 2 unless given. Throws WrongRegime (lambda >= 1),
/// EpsilonTooLarge (no admissible eta), DegenerateConstants (c1 <= -2).
InnerConstants derive_constants_inner(double lambda, double eps,
                                      std::optional<double> eta = std::nullopt);

struct HandleOptions {
  /// Enlarge eta by doubling while the profile still certifies.
  bool relax = false;
  /// Override the eta policy (ignored when relax is set).
  std::optional<double> eta;
  /// Base size of certification grids.
  std::size_t grid = 2000;
  /// Smoothing of the inverse (outer) or of f (inner).
  std::optional<SmoothingOptions> smoothing;
  /// Throw VerificationFailed when certification fails.
  bool require_certified = true;
};

enum class HandleKind { Outer, Inner };

struct HandleConstruction {
  HandleKind kind = HandleKind::Outer;
  double lambda = 0.0;
  double a = 1.0;
  double eps = 0.0;
  double c = 0.0;
  double eta = 0.0;
  double c1 = 0.0;
  /// Exact log of the sigma defined by the constants.
  double log_sigma = 0.0;
  /// sigma used by the profiles (see kSigmaFloor).
  double sigma = 0.0;
  double junction_slope = 2.0;
  /// Inner handle only.
  double k = 0.0;
  /// Number of doublings applied to eta in relax mode.
  int relax_steps = 0;

  RadialProfile fprime;
  RadialProfile f;
  /// Inverse of f on its monotone branch, extended by sigma past f(sigma).
  RadialProfile inverse;
  /// Outer: the smoothed inverse. Inner: the smoothed f.
  RadialProfile smoothed;
  /// Inner: end of the decreasing branch of f.
  double branch_end = 0.0;
  /// True when the 1/sqrt(t - sigma) piece is narrower than double resolution
  /// in the values of f and was dropped from the inverse.
  bool collapsed = false;

  /// Outer: the D+ condition for f on (sigma, eps). Inner: the D- condition for f on (sigma, eps].
  Certification f_certificate;
  /// The D- condition for the inverse (inner: on its decreasing branch).
  Certification inverse_certificate;
  /// Smoothing plus re-certification (outer: inverse, inner: f).
  SmoothedCertification smoothing_certificate;

  bool certified() const {
    return f_certificate.passed && inverse_certificate.passed && smoothing_certificate.passed;
  }
  double g(double t) const { return std::sqrt(lambda * t * t + a); }

  /// Negative inside, positive outside. Outer K: |x| - h(|y|) with h the smoothed
  /// inverse. Inner L: union of {|x| <= sigma} and {|x| > sigma, |y| <= f(|x|)},
  /// i.e. min(|x| - sigma, max(sigma - |x|, |y| - f(|x|))).
  double membership(double abs_x, double abs_y) const;
  double membership(const BoundaryPoint& p) const { return membership(p.x.norm(), p.y.norm()); }
};

HandleConstruction build_outer_handle(double lambda, double a, double eps,
                                      const HandleOptions& opts = {});
HandleConstruction build_inner_handle(double lambda, double eps, const HandleOptions& opts = {});

/// Rebuilds an a = 1 outer construction for general a: every length scales by
/// sqrt(a) (f_a(t) = sqrt(a) f(t / sqrt(a))). Throws InvalidArgument if
/// a <= 0 or the input does not have a = 1.
HandleConstruction rescale_outer(const HandleConstruction& base, double a,
                                 const HandleOptions& opts = {});

struct ContainmentReport {
  std::size_t samples = 0;
  /// Points of the inner set (D or the central disc) outside the handlebody.
  std::size_t lower_violations = 0;
  /// Points of the handlebody outside D union {|x| < eps}.
  std::size_t upper_violations = 0;
  bool passed() const { return lower_violations == 0 && upper_violations == 0; }
};

/// Samples points of C^2 (half in the radius-10 box, half near the handle, plus
/// points with |x| <= sigma) and checks D u {|x| <= sigma} in K (or L) in D u {|x| < eps}.
ContainmentReport check_containment(const HandleConstruction& h, std::size_t samples,
                                    std::uint64_t seed = 42);

// --- quadratic model --------------------------------------------------------

struct QuadraticPoint {
  Eigen::VectorXd x;  // Re z, length k
  Eigen::VectorXd y;  // Im z, length k
  Eigen::VectorXd u;  // Re w, length n - k
  Eigen::VectorXd v;  // Im w, length n - k
};

struct QuadraticHandle {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  double r = 0.0;
  double eps = 0.0;
  double lambda1 = 0.0;
  double t0 = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  double R = 0.0;
  double hR = 0.0;
  double c0 = 0.0;
  /// sup of t - h(t) for the smoothed cap; differs from c0 by the smoothing offset.
  double c0_smoothed = 0.0;
  RadialProfile cap;
  RadialProfile cap_smoothed;
  SmoothedCertification cap_certificate;

  int k() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(A.rows() + B.rows()); }
  double Q(const QuadraticPoint& p) const;
  double rho(const QuadraticPoint& p) const;
  /// tau = Q - h(|x|^2) with the smoothed cap.
  double tau(const QuadraticPoint& p) const;
  HermitianForm tau_hessian(const Eigen::VectorXd& x) const;
  /// tau(p) - c; negative inside K_c.
  double membership(const QuadraticPoint& p, double c = 0.0) const { return tau(p) - c; }
};

/// delta = min(eps / (2 t0), (lambda1 - 1) / 4, 1/2), mu = 1 + (lambda1 - 1 - delta) / 2,
/// R = mu^2 t0 / (mu + delta - 1)^2 with t0 = r + eps. Throws NotStronglyPsh
/// (lambda1 <= 1 or B not positive definite), ShapeError (non-square or
/// asymmetric beyond 1e-12), InvalidArgument (r, eps <= 0).
QuadraticHandle build_quadratic_handle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       double r, double eps,
                                       std::optional<SmoothingOptions> smoothing = std::nullopt,
                                       std::size_t grid = 2000);

/// Checks {rho <= -c0} u Lambda^k in {tau <= 0} in {rho < -r} u {Q < eps} on random samples.
ContainmentReport check_containment(const QuadraticHandle& q, std::size_t samples,
                                    std::uint64_t seed = 42);

// --- serialization ----------------------------------------------------------

nlohmann::json to_json(const HandleConstruction& h);
nlohmann::json to_json(const QuadraticHandle& q);
/// Certification summary written next to a construction.
nlohmann::json certificate_json(const HandleConstruction& h);
nlohmann::json certificate_json(const QuadraticHandle& q);

}  // namespace handle_forge
