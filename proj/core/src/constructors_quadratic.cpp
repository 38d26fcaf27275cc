#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "constructors_detail.hpp"

namespace handle_forge {

using detail::segment;

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    fail(ErrorCode::ShapeError, std::string(name) + " must be a nonempty square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    fail(ErrorCode::ShapeError, std::string(name) + " must be symmetric");
  }
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double quadratic_part(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return y.dot(a * y) + v.dot(b * v) + u.squaredNorm();
}

}  // namespace

double QuadraticHandle::Q(const QuadraticPoint& p) const { return quadratic_part(A, B, p.y, p.u, p.v); }

double QuadraticHandle::rho(const QuadraticPoint& p) const { return Q(p) - p.x.squaredNorm(); }

double QuadraticHandle::tau(const QuadraticPoint& p) const {
  return Q(p) - cap_smoothed.value(p.x.squaredNorm());
}

HermitianForm QuadraticHandle::tau_hessian(const Eigen::VectorXd& x) const {
  return quadratic_tau_hessian(A, B, cap_smoothed.jet(x.squaredNorm()), x);
}

QuadraticHandle build_quadratic_handle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       double r, double eps,
                                       std::optional<SmoothingOptions> smoothing,
                                       std::size_t grid) {
  check_symmetric(A, "A");
  check_symmetric(B, "B");
  if (!(r > 0.0) || !(eps > 0.0)) fail(ErrorCode::InvalidArgument, "r and eps must be positive");

  QuadraticHandle q;
  q.A = 0.5 * (A + A.transpose());
  q.B = 0.5 * (B + B.transpose());
  q.lambda1 = min_eigenvalue(q.A);
  if (!(q.lambda1 > 1.0)) fail(ErrorCode::NotStronglyPsh, "the smallest eigenvalue of A must exceed 1");
  if (!(min_eigenvalue(q.B) > 0.0)) fail(ErrorCode::NotStronglyPsh, "B must be positive definite");

  q.r = r;
  q.eps = eps;
  q.t0 = r + eps;
  q.delta = std::min({eps / (2.0 * q.t0), (q.lambda1 - 1.0) / 4.0, 0.5});
  q.mu = 1.0 + (q.lambda1 - 1.0 - q.delta) / 2.0;
  const double d = q.mu + q.delta - 1.0;
  q.R = q.mu * q.mu * q.t0 / (d * d);
  const double diff = std::sqrt(q.R) - std::sqrt(q.t0);
  q.hR = q.delta * q.R + q.mu * diff * diff;
  q.c0 = q.R - q.hR;

  q.cap = RadialProfile({segment(SegmentKind::Polynomial, 0.0, q.t0, {0.0, 0.0, q.delta}),
                         segment(SegmentKind::CapMiddle, q.t0, q.R, {q.delta, q.mu, q.t0}),
                         segment(SegmentKind::Polynomial, q.R, kInf, {q.R, q.hR, 1.0})},
                        Continuity::C1PiecewiseC2);

  SmoothingOptions sm = smoothing.value_or(SmoothingOptions{});
  sm.anchor = Anchor::Left;
  GridOptions g = detail::open_grid(grid, true, true);
  g.cap_bound = q.lambda1;
  q.cap_certificate =
      smooth_and_certify(q.cap, Condition::Cap, ClassKind::DMinusStrong, 0.0, 2.0 * q.R, g, sm);
  q.cap_smoothed = q.cap_certificate.smoothing.profile;

  // t - h(t) is nondecreasing (h' <= 1), so its supremum is its value past the last window.
  const double far = 2.0 * q.R;
  q.c0_smoothed = far - q.cap_smoothed.value(far);
  return q;
}

ContainmentReport check_containment(const QuadraticHandle& q, std::size_t samples,
                                    std::uint64_t seed) {
  const int k = q.k();
  const int m = q.n() - k;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double t_max = 3.0 * q.R;
  const double box = std::sqrt(t_max);

  auto random_dir = [&](int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    const double n = v.norm();
    return n > 0.0 ? Eigen::VectorXd(v / n) : v;
  };
  // Point with |x|^2 = t and Q = target (target >= 0).
  auto on_levels = [&](double t, double target) {
    QuadraticPoint p{random_dir(k) * std::sqrt(t), random_dir(k), random_dir(m), random_dir(m)};
    const double q_dir = quadratic_part(q.A, q.B, p.y, p.u, p.v);
    const double s = q_dir > 0.0 ? std::sqrt(std::max(0.0, target) / q_dir) : 0.0;
    p.y *= s;
    p.u *= s;
    p.v *= s;
    return p;
  };

  ContainmentReport rep;
  for (std::size_t i = 0; i < samples; ++i) {
    QuadraticPoint p;
    const std::size_t bucket = i % 10;
    const double t = t_max * unit(rng);
    const double wiggle = 1.0 + 2e-3 * (unit(rng) - 0.5);
    if (bucket < 3) {
      auto uniform = [&](int dim) {
        Eigen::VectorXd v(dim);
        for (int j = 0; j < dim; ++j) v[j] = box * (2.0 * unit(rng) - 1.0);
        return v;
      };
      p = {uniform(k), uniform(k), uniform(m), uniform(m)};
    } else if (bucket < 6) {
      p = on_levels(t, (t - q.c0_smoothed) * wiggle);
    } else if (bucket < 9) {
      p = on_levels(t, q.cap_smoothed.value(t) * wiggle);
    } else {
      p = {random_dir(k) * std::sqrt(2.0 * q.R * unit(rng)), Eigen::VectorXd::Zero(k),
           Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m)};
    }
    ++rep.samples;
    const double tau = q.tau(p);
    const bool on_core = p.y.isZero(0.0) && p.u.isZero(0.0) && p.v.isZero(0.0);
    if ((q.rho(p) <= -q.c0_smoothed || on_core) && tau > 0.0) ++rep.lower_violations;
    if (tau <= 0.0 && !(q.rho(p) < -q.r) && !(q.Q(p) < q.eps)) ++rep.upper_violations;
  }
  return rep;
}

}  // namespace handle_forge
