#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "handle_forge/constructors.hpp"
#include "handle_forge/error.hpp"
#include "handle_forge/levi.hpp"
#include "handle_forge/profile.hpp"
#include "handle_forge/pseudoconvexity.hpp"

using namespace handle_forge;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[FAILED: " << what << "] ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RadialProfile random_theta_spline(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(0.5, 3.0);
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> ys;
  for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(val(rng));
  return cubic_spline(xs, ys);
}

RadialProfile random_positive_spline(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(0.3, 2.5);
  const std::vector<double> xs{0.5, 0.8, 1.1, 1.4, 1.7, 2.0};
  std::vector<double> ys;
  for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(val(rng));
  return cubic_spline(xs, ys);
}

VectorXd random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = nd(rng);
  return v / v.norm();
}

bool near_breakpoint(const RadialProfile& p, double t, double gap) {
  for (const double b : p.breakpoints()) {
    if (std::abs(t - b) < gap) return true;
  }
  return false;
}

double min_eigenvalue(const HermitianForm& h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().minCoeff();
}

const QuadraticHandle& reference_quadratic() {
  static const QuadraticHandle q =
      build_quadratic_handle(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 1.0), 1.0, 0.5);
  return q;
}

// 1. Closed-form complex Hessians against finite differences.
void oracle_equivalence(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> rad(0.1, 2.0);
  double worst_rot = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const RadialProfile theta = random_theta_spline(rng);
    const int n = trial % 2 ? 4 : 2;
    double r = rad(rng);
    while (near_breakpoint(theta, r * r, 5e-2)) r = rad(rng);
    const BoundaryPoint p{random_unit(n, rng) * r, random_unit(n, rng) * std::sqrt(theta.value(r * r))};
    const auto rho = [&theta, n](const VectorXd& v) { return rotational_rho(theta, {v.head(n), v.tail(n)}); };
    const FdHessian fd = fd_hessian(rho, p);
    worst_rot = std::max(worst_rot, (fd.form - rotational_hessian(theta, p)).cwiseAbs().maxCoeff());
  }

  const QuadraticHandle& q = reference_quadratic();
  const RadialProfile& h = q.cap_smoothed;
  std::uniform_real_distribution<double> tdist(0.0, 2.0 * q.R);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  double worst_quad = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double t = tdist(rng);
    while (t < 0.01 || near_breakpoint(h, t, 0.05)) t = tdist(rng);
    VectorXd x(2), y(2);
    x << std::sqrt(t), coord(rng);
    y << coord(rng), coord(rng);
    // Coordinates (x_z, u_w, y_z, v_w) with z = x_z + i y_z and w = u_w + i v_w.
    const auto tau = [&](const VectorXd& v) {
      return q.A(0, 0) * v[2] * v[2] + q.B(0, 0) * v[3] * v[3] + v[1] * v[1] - h.value(v[0] * v[0]);
    };
    const FdHessian fd = fd_hessian(tau, {x, y});
    worst_quad = std::max(worst_quad, (fd.form - q.tau_hessian(x.head(1))).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(t0);
  o.require(worst_rot < 1e-7, "rotational Hessian");
  o.require(worst_quad < 1e-7, "quadratic Hessian");
  o.require(elapsed < 5.0, "runtime");
  o.detail << "max |closed - FD|: rotational " << worst_rot << ", quadratic " << worst_quad << "; " << elapsed
           << " s";
}

// 2. Theta form and f form give the same verdicts and margins.
void form_equivalence(Outcome& o) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> tdist(0.5, 2.0);
  int disagreements = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const RadialProfile f = random_positive_spline(rng);
    const RadialProfile theta = theta_of_f(f);
    for (int i = 0; i < 100; ++i) {
      const double t = tdist(rng);
      const ConditionReport a = f_condition(f, t);
      const ConditionReport b = theta_condition(theta, t * t);
      if (a.verdict != b.verdict) ++disagreements;
      const double f2 = f.value(t) * f.value(t);
      const double m1 = a.right.first.margin, m2 = a.right.second.margin;
      worst_rel = std::max(worst_rel, std::abs(b.right.first.margin - m1) / std::max(1.0, std::abs(m1)));
      worst_rel = std::max(worst_rel, std::abs(b.right.second.margin / f2 - m2) / std::max(1.0, std::abs(m2)));
    }
  }
  o.require(disagreements == 0, "verdict disagreements");
  o.require(worst_rel < 1e-10, "margin mismatch");
  o.detail << "20000 points, " << disagreements << " disagreements, max relative margin gap " << worst_rel;
}

// 3. Strict (reversed) inequalities iff all restricted eigenvalues are positive (negative).
void levi_dichotomy(Outcome& o) {
  std::mt19937_64 rng(42);
  std::vector<std::pair<RadialProfile, std::pair<double, double>>> profiles;
  profiles.push_back({sqrt_quadratic(0.5, 1.0), {0.05, 5.0}});
  profiles.push_back({sqrt_quadratic(2.0, 1.0), {0.05, 5.0}});
  profiles.push_back({restricted(sqrt_quadratic(-1.0, 1.0), 0.0, 0.96), {0.05, 0.95}});
  for (int i = 0; i < 4; ++i) profiles.push_back({random_positive_spline(rng), {0.5, 2.0}});

  std::size_t exceptions = 0, radii = 0, points = 0, strict = 0, reversed = 0, mixed = 0;
  for (const int n : {2, 4}) {
    for (const auto& [f, range] : profiles) {
      const RadialProfile theta = theta_of_f(f);
      for (int i = 0; i < 50; ++i) {
        const double r = range.first + (range.second - range.first) * (i + 0.5) / 50.0;
        const ConditionReport cr = theta_condition(theta, r * r);
        if (cr.split || cr.verdict == Verdict::Equality) continue;
        ++radii;
        strict += cr.verdict == Verdict::StrictHolds;
        reversed += cr.verdict == Verdict::ReverseHolds;
        mixed += cr.verdict == Verdict::Violated;
        const double ry = f.value(r);
        bool all_pos = true, all_neg = true;
        for (int k = 0; k < 20; ++k) {
          const VectorXd x = random_unit(n, rng) * r;
          VectorXd y = random_unit(n, rng);
          if (k == 0) y = x;
          if (k == 1) y -= y.dot(x) / x.squaredNorm() * x;
          y *= ry / y.norm();
          const VectorXd s = rotational_levi_spectrum(theta, {x, y});
          all_pos = all_pos && s.minCoeff() > 0.0;
          all_neg = all_neg && s.maxCoeff() < 0.0;
          ++points;
        }
        if ((cr.verdict == Verdict::StrictHolds) != all_pos) ++exceptions;
        if ((cr.verdict == Verdict::ReverseHolds) != all_neg) ++exceptions;
      }
    }
  }
  o.require(exceptions == 0, "exceptions");
  o.require(strict > 0 && reversed > 0, "both classes exercised");
  o.detail << radii << " radii (" << strict << " strict, " << reversed << " reversed, " << mixed << " mixed), "
           << points << " points, " << exceptions << " exceptions";
}

// 4. The model family g(t) = sqrt(lambda t^2 + 1).
void model_family(Outcome& o) {
  double worst_residual = 0.0;
  for (const double lambda : {-1.0, 0.5, 2.0, 5.0}) {
    const RadialProfile g = sqrt_quadratic(lambda, 1.0);
    const double hi = std::min(10.0, 0.99 * g.domain_hi());
    for (int i = 0; i <= 1000; ++i) {
      const double t = 0.1 + (hi - 0.1) * i / 1000.0;
      const Jet j = g.jet(t);
      worst_residual =
          std::max(worst_residual, std::abs(j.value * (j.d2 + j.d1 * j.d1 * j.d1 / (lambda * t)) - lambda));
    }
    GridOptions grid;
    grid.n_grid = 10000;
    const Classification c = classify(g, Condition::FForm, 0.1, hi, grid);
    const ClassKind want = lambda < 1.0 ? ClassKind::DMinusStrong : ClassKind::DPlusStrong;
    std::ostringstream tag;
    tag << "lambda " << lambda;
    o.require(c.kind == want && c.worst_margin > 0.0, tag.str());
    o.detail << "lambda " << lambda << ": " << to_string(c.kind) << " margin " << c.worst_margin << " on [0.1, "
             << hi << "]; ";
  }
  o.require(worst_residual < 1e-10, "ODE residual");
  o.detail << "max ODE residual " << worst_residual;
}

// 5. Outer handle, lambda = 2, a = 1, eps = 0.5, relaxed.
void outer_end_to_end(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  HandleOptions opts;
  opts.relax = true;
  const HandleConstruction h = build_outer_handle(2.0, 1.0, 0.5, opts);
  const double lambda = 2.0, eps = 0.5;
  const double g = std::sqrt(lambda * eps * eps + 1.0);
  const double gp = lambda * eps / g, gpp = lambda / (g * g * g);
  const double c_err = std::abs(h.c - (gp - eps * gpp));
  const double c1_err = std::abs(h.c1 - (h.c + h.eta * gpp));
  const double sigma_err =
      std::abs(h.c1 + h.eta * (std::log(h.eta) - std::log(2.0) - h.log_sigma) - h.junction_slope);
  o.require(c_err < 1e-10 && c1_err < 1e-10 && sigma_err < 1e-10, "defining equations");
  o.require(h.junction_slope == 2.0, "unmodified junction");
  o.require(h.eta > 0.0 && h.eta < h.eps && h.c1 < 2.0, "constant ranges");

  bool equal_beyond = true;
  for (int i = 0; i <= 1000; ++i) {
    const double t = eps * (1.0 + 19.0 * i / 1000.0);
    equal_beyond = equal_beyond && h.f.value(t) == h.g(t);
  }
  bool below_inside = true;
  for (int i = 0; i < 1000; ++i) {
    const double t = h.sigma + (eps - h.sigma) * (i + 0.5) / 1000.0;
    below_inside = below_inside && h.f.value(t) < h.g(t);
  }
  o.require(equal_beyond, "f = g beyond eps");
  o.require(below_inside, "f < g inside");
  o.require(h.f_certificate.passed && h.f_certificate.classification.worst_margin > 0.0, "D+ condition on f");
  const Certification& inv = h.smoothing_certificate.after;
  o.require(h.smoothing_certificate.passed && inv.classification.worst_margin > 0.0, "D- condition on smoothed inverse");
  const ContainmentReport rep = check_containment(h, 100000, 42);
  o.require(rep.passed(), "containment");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 30.0, "runtime");
  o.detail << "sigma " << h.sigma << ", eta " << h.eta << ", D+ margin " << h.f_certificate.classification.worst_margin
           << ", D- margin " << inv.classification.worst_margin << ", containment " << rep.lower_violations << "/"
           << rep.upper_violations << " of " << rep.samples << "; " << elapsed << " s";
}

// 6. Inner handles for lambda in {-1, 0, 0.5}, eps = 0.5.
void inner_end_to_end(Outcome& o) {
  for (const double lambda : {-1.0, 0.0, 0.5}) {
    const auto t0 = std::chrono::steady_clock::now();
    const HandleConstruction h = build_inner_handle(lambda, 0.5);
    std::ostringstream tag;
    tag << "lambda " << lambda;
    const Certification& cert = h.smoothing_certificate.after;
    o.require(h.certified() && cert.classification.worst_margin > 0.0, tag.str() + " D- condition");
    bool above = true;
    for (int i = 0; i < 1000; ++i) {
      const double t = h.sigma + (h.eps - h.sigma) * i / 1000.0;
      above = above && h.f.value(t) > h.g(t);
    }
    o.require(above, tag.str() + " f > g");
    const ContainmentReport rep = check_containment(h, 100000, 42);
    o.require(rep.passed(), tag.str() + " containment");
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 30.0, tag.str() + " runtime");
    o.detail << "lambda " << lambda << ": D- margin " << cert.classification.worst_margin << ", containment "
             << rep.lower_violations << "/" << rep.upper_violations << ", " << elapsed << " s; ";
  }
}

// 7. Quadratic model handle, A = [2], B = [1], r = 1, eps = 0.5.
void quadratic_end_to_end(Outcome& o) {
  const QuadraticHandle& q = reference_quadratic();
  // Independent re-derivation in long double.
  const long double lambda1 = 2.0L, r = 1.0L, eps = 0.5L;
  const long double t0 = r + eps;
  const long double delta = std::min({eps / (2.0L * t0), (lambda1 - 1.0L) / 4.0L, 0.5L});
  const long double mu = 1.0L + (lambda1 - 1.0L - delta) / 2.0L;
  const long double R = mu * mu * t0 / ((mu + delta - 1.0L) * (mu + delta - 1.0L));
  const long double hR = delta * R + mu * (std::sqrt(R) - std::sqrt(t0)) * (std::sqrt(R) - std::sqrt(t0));
  const long double c0 = R - hR;
  o.require(std::abs(q.c0 - static_cast<double>(c0)) < 1e-12, "c0 re-derivation");
  o.require(std::abs(q.c0 - 3.03576) < 1e-4, "c0 reference value");
  o.require(std::abs(q.R - static_cast<double>(R)) < 1e-12 && std::abs(q.hR - static_cast<double>(hR)) < 1e-12,
            "R and h(R)");

  double min_eig = kInf;
  for (int i = 0; i < 10000; ++i) {
    const double t = 2.0 * q.R * i / 9999.0;
    min_eig = std::min(min_eig, min_eigenvalue(q.tau_hessian(VectorXd::Constant(1, std::sqrt(t)))));
  }
  o.require(min_eig > 0.0, "tau Levi eigenvalue");

  double worst_identity = 0.0;
  for (int i = 1; i < 100; ++i) {
    const double t = q.t0 + (q.R - q.t0) * i / 100.0;
    const Jet j = q.cap.jet(t);
    worst_identity = std::max(worst_identity, std::abs(2.0 * t * j.d2 + j.d1 - (q.mu + q.delta)));
  }
  o.require(worst_identity < 1e-10, "middle identity");
  const ContainmentReport rep = check_containment(q, 100000, 42);
  o.require(rep.passed(), "containment (iii)");
  o.detail << "c0 " << std::setprecision(10) << q.c0 << std::setprecision(6) << ", min tau eigenvalue " << min_eig
           << ", identity residual " << worst_identity << ", containment " << rep.lower_violations << "/"
           << rep.upper_violations << " of " << rep.samples;
}

// 8. Solutions of f (f'' + f'^3 / t) = 1 with f f' / t < 1 are weakly pseudoconvex.
void degenerate_ode(Outcome& o) {
  // Integrate f'' = 1/f - f'^3/t from t = 1 with f = 1, f' = 0 by classical RK4.
  const auto rhs = [](double t, double f, double fp) { return 1.0 / f - fp * fp * fp / t; };
  const double t_start = 1.0, t_end = 1.6;
  const int steps = 6000;
  const double dt = (t_end - t_start) / steps;
  std::vector<double> ts;
  std::vector<Jet> jets;
  double t = t_start, f = 1.0, fp = 0.0;
  for (int i = 0; i <= steps; ++i) {
    ts.push_back(t);
    jets.push_back({f, fp, rhs(t, f, fp)});
    if (i == steps) break;
    const double k1f = fp, k1p = rhs(t, f, fp);
    const double k2f = fp + 0.5 * dt * k1p, k2p = rhs(t + 0.5 * dt, f + 0.5 * dt * k1f, k2f);
    const double k3f = fp + 0.5 * dt * k2p, k3p = rhs(t + 0.5 * dt, f + 0.5 * dt * k2f, k3f);
    const double k4f = fp + dt * k3p, k4p = rhs(t + dt, f + dt * k3f, k4f);
    f += dt / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
    fp += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    t = t_start + (i + 1) * dt;
  }
  const RadialProfile prof = quintic_hermite(ts, jets);
  const RadialProfile theta = theta_of_f(prof);

  double worst_residual = 0.0, worst_ratio = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = t_start + (t_end - t_start) * i / 2000.0;
    const Jet j = prof.jet(s);
    worst_residual = std::max(worst_residual, std::abs(j.value * (j.d2 + j.d1 * j.d1 * j.d1 / s) - 1.0));
    worst_ratio = std::max(worst_ratio, j.value * j.d1 / s);
  }
  o.require(worst_residual < 1e-8, "ODE residual");
  o.require(worst_ratio < 1.0, "f f'/t < 1");

  std::mt19937_64 rng(42);
  double orth_min = kInf, orth_max = -kInf, skew_min = kInf;
  for (const int n : {2, 4}) {
    for (int i = 0; i < 50; ++i) {
      const double r = t_start + 0.02 + (t_end - t_start - 0.04) * (i + 0.5) / 50.0;
      const double ry = prof.value(r);
      for (int k = 0; k < 20; ++k) {
        const VectorXd x = random_unit(n, rng) * r;
        VectorXd y = random_unit(n, rng);
        const bool orth = k % 2 == 0;
        if (orth) y -= y.dot(x) / x.squaredNorm() * x;
        y *= ry / y.norm();
        const double lo = rotational_levi_spectrum(theta, {x, y}).minCoeff();
        if (orth) {
          orth_min = std::min(orth_min, lo);
          orth_max = std::max(orth_max, lo);
        } else {
          skew_min = std::min(skew_min, lo);
        }
      }
    }
  }
  o.require(orth_min >= -1e-6 && orth_max <= 1e-6, "degenerate eigenvalue at x.y = 0");
  o.require(skew_min > 0.0, "positive eigenvalue at x.y != 0");
  o.detail << "residual " << worst_residual << ", max f f'/t " << worst_ratio << ", min eigenvalue at x.y = 0 in ["
           << orth_min << ", " << orth_max << "], at x.y != 0 >= " << skew_min;
}

// 9. Smoothing at the default radius loses less than 10% of the margin.
void smoothing_safety(Outcome& o) {
  const auto check = [&](const std::string& name, const SmoothedCertification& s) {
    const double before = s.before.classification.worst_margin;
    const double ratio = s.margin_loss / before;
    o.require(s.passed && s.halvings == 0 && ratio < 0.1, name);
    o.detail << name << ": loss " << s.margin_loss << " of " << before << " (" << 100.0 * ratio << "%); ";
  };
  HandleOptions opts;
  opts.relax = true;
  check("outer", build_outer_handle(2.0, 1.0, 0.5, opts).smoothing_certificate);
  for (const double lambda : {-1.0, 0.0, 0.5}) {
    std::ostringstream name;
    name << "inner " << lambda;
    check(name.str(), build_inner_handle(lambda, 0.5).smoothing_certificate);
  }
  check("quadratic", reference_quadratic().cap_certificate);
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "closed-form Hessians match finite differences", oracle_equivalence},
      {2, "theta form and f form agree", form_equivalence},
      {3, "inequality verdicts match Levi spectrum signs", levi_dichotomy},
      {4, "model family identities and classification", model_family},
      {5, "outer handle end to end", outer_end_to_end},
      {6, "inner handles end to end", inner_end_to_end},
      {7, "quadratic handle end to end", quadratic_end_to_end},
      {8, "degenerate ODE gives weak pseudoconvexity", degenerate_ode},
      {9, "smoothing safety", smoothing_safety},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[EXCEPTION: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << " | " << c.title << " | "
              << o.detail.str() << std::endl;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
