#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "handle_forge/profile.hpp"

namespace handle_forge {

using HermitianForm = Eigen::MatrixXcd;
/// Columns form an orthonormal basis of the complex tangent space.
using TangentFrame = Eigen::MatrixXcd;

/// Point x + iy of C^n.
struct BoundaryPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
};

// The Levi form of rho at z is L(z; v) = sum_{j,k} d^2 rho / dz_j dzbar_k v_j conj(v_k)
// with dz = (dx - i dy) / 2. All forms below use this convention.

/// rho(x + iy) = |y|^2 - theta(|x|^2).
double rotational_rho(const RadialProfile& theta, const BoundaryPoint& p);

/// (d rho / dz_k)_k = -(x_k theta' + i y_k), theta' at |x|^2.
Eigen::VectorXcd rotational_gradient(const RadialProfile& theta, const BoundaryPoint& p,
                                     Side side = Side::Right);

/// H_kk = (1 - theta' - 2 x_k^2 theta'') / 2, H_jk = -x_j x_k theta''.
HermitianForm rotational_hessian(const RadialProfile& theta, const BoundaryPoint& p,
                                 Side side = Side::Right);
HermitianForm rotational_hessian(const Jet& theta_jet, const Eigen::VectorXd& x);

/// Orthonormal basis of {v : sum_k grad_k v_k = 0}. Throws SingularPoint for grad = 0.
TangentFrame tangent_frame(const Eigen::VectorXcd& grad);

/// Ascending eigenvalues of the restricted form G_ab = sum H_jk F_ja conj(F_kb).
Eigen::VectorXd restricted_levi_spectrum(const HermitianForm& h, const TangentFrame& frame);

/// L(v) = sum H_jk v_j conj(v_k) (real part; the imaginary part vanishes for Hermitian H).
double levi_value(const HermitianForm& h, const Eigen::VectorXcd& v);

/// Spectrum of the restricted Levi form of rho at a point of {rho = 0}.
Eigen::VectorXd rotational_levi_spectrum(const RadialProfile& theta, const BoundaryPoint& p,
                                         Side side = Side::Right);

/// Twice the Levi form at the reduced point (x1 + i y1, i y2, 0, ..., 0) for the
/// tangent vector v = (-coef i y2, coef (x1 theta' + i y1), v''):
///   |coef|^2 (-2 x1^2 y2^2 theta'' + (1 - theta')(x1^2 theta'^2 + theta)) + (1 - theta')|v''|^2.
/// Throws NotOnHypersurface if y1^2 + y2^2 differs from theta(x1^2) by more than 1e-10 relative.
double canonical_levi_value(const RadialProfile& theta, double x1, double y1, double y2,
                            std::complex<double> coef, const Eigen::VectorXcd& v_rest);

/// The tangent vector used by canonical_levi_value, embedded in C^(2 + v_rest.size()).
Eigen::VectorXcd canonical_tangent_vector(const RadialProfile& theta, double x1, double y1,
                                          double y2, std::complex<double> coef,
                                          const Eigen::VectorXcd& v_rest);

struct FdHessian {
  HermitianForm form;
  /// Largest Richardson correction over the entries, a truncation-error estimate.
  double error_estimate = 0.0;
};

/// Real field of the 2n coordinates (x_1..x_n, y_1..y_n).
using RealField = std::function<double(const Eigen::VectorXd&)>;

/// Complex Hessian by central second differences with one Richardson step.
FdHessian fd_hessian(const RealField& field, const BoundaryPoint& p, double step = 1e-3);

/// Complex Hessian of tau(z, w) = <A y, y> + <B v, v> + |u|^2 - h(|x|^2)
/// (z = x + iy in C^k, w = u + iv in C^(n-k)): block diagonal with
/// z-block (A - h' I)/2 - h'' x x^T and w-block (B + I)/2.
/// Throws ShapeError on dimension mismatch.
HermitianForm quadratic_tau_hessian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                    const Jet& h_jet, const Eigen::VectorXd& x);

}  // namespace handle_forge
