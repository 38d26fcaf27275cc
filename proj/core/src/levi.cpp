#include "handle_forge/levi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "handle_forge/error.hpp"

namespace handle_forge {

namespace {

void check_point(const BoundaryPoint& p) {
  if (p.x.size() != p.y.size() || p.x.size() == 0) {
    fail(ErrorCode::ShapeError, "x and y must be nonempty vectors of equal length");
  }
}

Eigen::VectorXd stack(const BoundaryPoint& p) {
  Eigen::VectorXd v(p.x.size() * 2);
  v << p.x, p.y;
  return v;
}

}  // namespace

double rotational_rho(const RadialProfile& theta, const BoundaryPoint& p) {
  check_point(p);
  return p.y.squaredNorm() - theta.value(p.x.squaredNorm());
}

Eigen::VectorXcd rotational_gradient(const RadialProfile& theta, const BoundaryPoint& p,
                                     Side side) {
  check_point(p);
  const double tp = theta.jet(p.x.squaredNorm(), side).d1;
  Eigen::VectorXcd g(p.x.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) g[k] = {-p.x[k] * tp, -p.y[k]};
  return g;
}

HermitianForm rotational_hessian(const Jet& th, const Eigen::VectorXd& x) {
  Eigen::MatrixXd h = -th.d2 * (x * x.transpose());
  h.diagonal().array() += 0.5 * (1.0 - th.d1);
  return h.cast<std::complex<double>>();
}

HermitianForm rotational_hessian(const RadialProfile& theta, const BoundaryPoint& p, Side side) {
  check_point(p);
  return rotational_hessian(theta.jet(p.x.squaredNorm(), side), p.x);
}

TangentFrame tangent_frame(const Eigen::VectorXcd& grad) {
  const Eigen::Index n = grad.size();
  if (n < 2) fail(ErrorCode::ShapeError, "the complex tangent space is trivial for n < 2");
  if (grad.norm() == 0.0) fail(ErrorCode::SingularPoint, "zero complex gradient");
  const Eigen::MatrixXcd a = grad.conjugate();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  return q.rightCols(n - 1);
}

Eigen::VectorXd restricted_levi_spectrum(const HermitianForm& h, const TangentFrame& frame) {
  if (h.rows() != h.cols() || h.rows() != frame.rows()) {
    fail(ErrorCode::ShapeError, "form and frame dimensions disagree");
  }
  Eigen::MatrixXcd g = frame.transpose() * h * frame.conjugate();
  g = 0.5 * (g + g.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double levi_value(const HermitianForm& h, const Eigen::VectorXcd& v) {
  return (v.transpose() * h * v.conjugate()).value().real();
}

Eigen::VectorXd rotational_levi_spectrum(const RadialProfile& theta, const BoundaryPoint& p,
                                         Side side) {
  return restricted_levi_spectrum(rotational_hessian(theta, p, side),
                                  tangent_frame(rotational_gradient(theta, p, side)));
}

Eigen::VectorXcd canonical_tangent_vector(const RadialProfile& theta, double x1, double y1,
                                          double y2, std::complex<double> coef,
                                          const Eigen::VectorXcd& v_rest) {
  const double tp = theta.jet(x1 * x1).d1;
  Eigen::VectorXcd v(2 + v_rest.size());
  v[0] = -coef * std::complex<double>(0.0, y2);
  v[1] = coef * std::complex<double>(x1 * tp, y1);
  v.tail(v_rest.size()) = v_rest;
  return v;
}

double canonical_levi_value(const RadialProfile& theta, double x1, double y1, double y2,
                            std::complex<double> coef, const Eigen::VectorXcd& v_rest) {
  const Jet th = theta.jet(x1 * x1);
  const double r2 = y1 * y1 + y2 * y2;
  if (std::abs(r2 - th.value) > 1e-10 * std::max(1.0, std::abs(th.value))) {
    std::ostringstream os;
    os << "y1^2 + y2^2 = " << r2 << " but theta(x1^2) = " << th.value;
    fail(ErrorCode::NotOnHypersurface, os.str());
  }
  const double one_minus = 1.0 - th.d1;
  return std::norm(coef) *
             (-2.0 * x1 * x1 * y2 * y2 * th.d2 + one_minus * (x1 * x1 * th.d1 * th.d1 + th.value)) +
         one_minus * v_rest.squaredNorm();
}

FdHessian fd_hessian(const RealField& field, const BoundaryPoint& p, double step) {
  check_point(p);
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "step must be positive");
  const Eigen::VectorXd base = stack(p);
  const Eigen::Index m = base.size();
  const Eigen::Index n = p.x.size();
  const double f0 = field(base);

  const auto second = [&](Eigen::Index a, Eigen::Index b, double h) {
    Eigen::VectorXd q = base;
    if (a == b) {
      q[a] = base[a] + h;
      const double fp = field(q);
      q[a] = base[a] - h;
      const double fm = field(q);
      return (fp - 2.0 * f0 + fm) / (h * h);
    }
    double acc = 0.0;
    for (int sa : {1, -1}) {
      for (int sb : {1, -1}) {
        q = base;
        q[a] += sa * h;
        q[b] += sb * h;
        acc += sa * sb * field(q);
      }
    }
    return acc / (4.0 * h * h);
  };

  Eigen::MatrixXd d2(m, m);
  double err = 0.0;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      const double coarse = second(a, b, step);
      const double fine = second(a, b, 0.5 * step);
      const double corr = (fine - coarse) / 3.0;
      d2(a, b) = d2(b, a) = fine + corr;
      err = std::max(err, std::abs(corr));
    }
  }

  FdHessian out;
  out.form.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double re = 0.25 * (d2(j, k) + d2(n + j, n + k));
      const double im = 0.25 * (d2(j, n + k) - d2(n + j, k));
      out.form(j, k) = {re, im};
    }
  }
  out.error_estimate = err;
  return out;
}

HermitianForm quadratic_tau_hessian(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                    const Jet& h_jet, const Eigen::VectorXd& x) {
  const Eigen::Index k = a.rows();
  const Eigen::Index m = b.rows();
  if (a.cols() != k || b.cols() != m || x.size() != k) {
    fail(ErrorCode::ShapeError, "A must be k x k, B square, and x of length k");
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k + m, k + m);
  h.topLeftCorner(k, k) = 0.5 * a - h_jet.d2 * (x * x.transpose());
  h.topLeftCorner(k, k).diagonal().array() -= 0.5 * h_jet.d1;
  h.bottomRightCorner(m, m) = 0.5 * b;
  h.bottomRightCorner(m, m).diagonal().array() += 0.5;
  return h.cast<std::complex<double>>();
}

}  // namespace handle_forge
