#include <algorithm>
#include <cmath>
#include <random>

#include "constructors_detail.hpp"

namespace handle_forge {

using detail::segment;

OuterConstants derive_constants_outer(double lambda, double eps, double a,
                                      std::optional<double> eta) {
  if (!(lambda > 1.0)) fail(ErrorCode::NotStronglyPsh, "outer handles need lambda > 1");
  if (!(a > 0.0)) fail(ErrorCode::InvalidArgument, "a must be positive");
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorCode::InvalidArgument, "eps must be positive");

  const double s = std::sqrt(a);
  const double e1 = eps / s;
  const double g1 = std::sqrt(lambda * e1 * e1 + 1.0);
  const double g1_second = lambda / (g1 * g1 * g1);

  OuterConstants k;
  k.lambda = lambda;
  k.a = a;
  k.eps = eps;
  k.c = lambda * lambda * e1 * e1 * e1 / (g1 * g1 * g1);
  const double eta1 = eta ? *eta / s : 0.5 * std::min(e1, k.c * k.c * k.c / 3.0);
  if (!(eta1 > 0.0)) fail(ErrorCode::InvalidArgument, "eta must be positive");
  if (!(eta1 < e1)) fail(ErrorCode::EpsilonTooLarge, "eta must stay below eps");
  k.c1 = k.c + eta1 * g1_second;
  if (!(k.c1 < 2.0)) fail(ErrorCode::EpsilonTooLarge, "slope c1 reaches 2; choose a smaller eps");
  k.eta = eta1 * s;
  k.log_sigma = std::log(eta1 / 2.0) + (k.c1 - 2.0) / eta1 + std::log(s);
  k.sigma = std::exp(k.log_sigma);
  k.sigma_effective = k.sigma;
  if (k.log_sigma < std::log(kSigmaFloor)) {
    // Slope of the log piece at 2 * kSigmaFloor (in a = 1 units).
    const double m = k.c1 + eta1 * (std::log(eta1) - std::log(2.0 * kSigmaFloor / s));
    k.junction_slope = m;
    k.sigma_effective = m >= kMinJunctionSlope ? kSigmaFloor : 0.0;
  }
  return k;
}

namespace {

struct OuterProfiles {
  RadialProfile fprime;
  RadialProfile f;
  RadialProfile inverse;
  bool collapsed = false;
};

OuterProfiles outer_profiles(const OuterConstants& k) {
  const double s = std::sqrt(k.a);
  const double sig = k.sigma_effective;
  const double g = std::sqrt(k.lambda * k.eps * k.eps + k.a);
  const double gp = k.lambda * k.eps / g;
  const double gpp = k.lambda * k.a / (g * g * g);
  const double beta = -k.eta / s;

  OuterProfiles out;
  out.fprime = RadialProfile(
      {segment(SegmentKind::InvSqrtSlope, sig, 2.0 * sig, {sig, k.junction_slope * std::sqrt(sig)}),
       segment(SegmentKind::LogSlope, 2.0 * sig, k.eta, {k.c1 - beta * std::log(k.eta), beta}),
       segment(SegmentKind::Polynomial, k.eta, k.eps, {k.eps, gp, gpp}),
       segment(SegmentKind::SqrtQuadraticSlope, k.eps, kInf, {k.lambda, k.a, 1.0})},
      Continuity::C0);
  out.f = integrate_derivative(out.fprime, k.eps, g);

  const auto fs = out.f.segments();
  const double u_sig = fs[0].value(sig);
  const double u_2sig = fs[1].value(2.0 * sig);
  const double u_eta = fs[2].value(k.eta);
  const double u_eps = fs[3].value(k.eps);
  out.collapsed = !(u_2sig > u_sig);

  std::vector<Segment> inv;
  inv.push_back(segment(SegmentKind::Constant, 0.0, u_sig, {sig}));
  if (!out.collapsed) {
    Segment near = inverse_segment(fs[0]);
    near.lo = u_sig;
    near.hi = u_2sig;
    inv.push_back(std::move(near));
  }
  Segment log_part = inverse_segment(fs[1]);
  log_part.lo = out.collapsed ? u_sig : u_2sig;
  log_part.hi = u_eta;
  inv.push_back(std::move(log_part));
  Segment poly_part = inverse_segment(fs[2]);
  poly_part.lo = u_eta;
  poly_part.hi = u_eps;
  inv.push_back(std::move(poly_part));
  inv.push_back(segment(SegmentKind::SqrtQuadratic, u_eps, kInf,
                        {1.0 / k.lambda, -k.a / k.lambda, 1.0}));
  out.inverse = RadialProfile(std::move(inv),
                              out.collapsed ? Continuity::C0 : Continuity::C1PiecewiseC2);
  return out;
}

double inverse_upper(const OuterConstants& k) {
  return 2.0 * std::sqrt(4.0 * k.lambda * k.eps * k.eps + k.a);
}

struct OuterCheck {
  Certification f;
  Certification inverse;
  bool passed() const { return f.passed && inverse.passed; }
};

OuterCheck certify_outer(const OuterConstants& k, const OuterProfiles& p, std::size_t grid) {
  OuterCheck c;
  c.f = reverify(p.f, Condition::FForm, ClassKind::DPlusStrong, k.sigma_effective, k.eps,
                 detail::open_grid(grid, false, false));
  c.inverse = reverify(p.inverse, Condition::FForm, ClassKind::DMinusStrong, 0.0,
                       inverse_upper(k), detail::open_grid(grid, false, true));
  return c;
}

HandleConstruction assemble_outer(const OuterConstants& k, int relax_steps,
                                  const HandleOptions& opts) {
  if (!(k.sigma_effective > 0.0)) {
    fail(ErrorCode::DegenerateConstants,
         "sigma = exp(" + std::to_string(k.log_sigma) +
             ") is below double range; enable relax or choose a larger eps");
  }
  OuterProfiles p = outer_profiles(k);

  HandleConstruction h;
  h.kind = HandleKind::Outer;
  h.lambda = k.lambda;
  h.a = k.a;
  h.eps = k.eps;
  h.c = k.c;
  h.eta = k.eta;
  h.c1 = k.c1;
  h.log_sigma = k.log_sigma;
  h.sigma = k.sigma_effective;
  h.junction_slope = k.junction_slope;
  h.relax_steps = relax_steps;
  h.collapsed = p.collapsed;
  h.branch_end = k.eps;

  const OuterCheck check = certify_outer(k, p, opts.grid);
  h.f_certificate = check.f;
  h.inverse_certificate = check.inverse;

  SmoothingOptions sm = opts.smoothing.value_or(SmoothingOptions{});
  sm.anchor = Anchor::Left;
  h.smoothing_certificate =
      smooth_and_certify(p.inverse, Condition::FForm, ClassKind::DMinusStrong, 0.0,
                         inverse_upper(k), detail::open_grid(opts.grid, false, true), sm);
  h.smoothed = h.smoothing_certificate.smoothing.profile;
  h.fprime = std::move(p.fprime);
  h.f = std::move(p.f);
  h.inverse = std::move(p.inverse);

  if (opts.require_certified && !h.certified()) {
    if (!h.f_certificate.passed) fail(ErrorCode::VerificationFailed, detail::describe_failure("f", h.f_certificate));
    if (!h.inverse_certificate.passed) {
      fail(ErrorCode::VerificationFailed, detail::describe_failure("inverse", h.inverse_certificate));
    }
    fail(ErrorCode::VerificationFailed,
         detail::describe_failure("smoothed inverse", h.smoothing_certificate.after));
  }
  return h;
}

}  // namespace

HandleConstruction build_outer_handle(double lambda, double a, double eps,
                                      const HandleOptions& opts) {
  if (!opts.relax) return assemble_outer(derive_constants_outer(lambda, eps, a, opts.eta), 0, opts);

  // Double eta while the unsmoothed profiles still certify; keep the last good one.
  const OuterConstants base = derive_constants_outer(lambda, eps, a);
  std::optional<OuterConstants> best;
  int best_steps = 0;
  for (int j = 0; j < 64; ++j) {
    OuterConstants k;
    try {
      k = derive_constants_outer(lambda, eps, a, base.eta * std::ldexp(1.0, j));
    } catch (const Error&) {
      break;
    }
    if (!(k.sigma_effective > 0.0)) continue;
    const OuterProfiles p = outer_profiles(k);
    if (!certify_outer(k, p, opts.grid).passed()) {
      if (best) break;
      continue;
    }
    best = k;
    best_steps = j;
  }
  if (!best) {
    fail(ErrorCode::DegenerateConstants, "no enlarged eta gives a representable certified sigma");
  }
  return assemble_outer(*best, best_steps, opts);
}

HandleConstruction rescale_outer(const HandleConstruction& base, double a,
                                 const HandleOptions& opts) {
  if (base.kind != HandleKind::Outer || base.a != 1.0) {
    fail(ErrorCode::InvalidArgument, "rescaling starts from an outer construction with a = 1");
  }
  if (!(a > 0.0)) fail(ErrorCode::InvalidArgument, "a must be positive");
  const double s = std::sqrt(a);
  const OuterConstants k =
      derive_constants_outer(base.lambda, base.eps * s, a, base.eta * s);
  return assemble_outer(k, base.relax_steps, opts);
}

double HandleConstruction::membership(double abs_x, double abs_y) const {
  if (kind == HandleKind::Outer) return abs_x - smoothed.value(abs_y);
  const double inside_disc = abs_x - sigma;
  if (abs_x <= sigma) return inside_disc;
  if (abs_x > smoothed.domain_hi()) return abs_x - smoothed.domain_hi();
  return std::min(inside_disc, std::max(-inside_disc, abs_y - smoothed.value(abs_x)));
}

ContainmentReport check_containment(const HandleConstruction& h, std::size_t samples,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  const bool outer = h.kind == HandleKind::Outer;
  const double x_hi = outer ? kInf : 1.0 / std::sqrt(std::max(0.0, -h.lambda));

  auto in_d = [&](double ax, double ay) {
    if (ax > x_hi) return false;
    const double g = h.g(ax);
    return outer ? ay > g : ay < g;
  };
  auto outside_d_closure = [&](double ax, double ay) {
    if (ax >= x_hi) return !outer;
    const double g = h.g(ax);
    return outer ? ay < g : ay > g;
  };

  ContainmentReport rep;
  for (std::size_t i = 0; i < samples; ++i) {
    double ax = 0.0, ay = 0.0;
    const std::size_t bucket = i % 10;
    if (bucket < 4) {
      const Eigen::Vector2d x(box(rng), box(rng));
      const Eigen::Vector2d y(box(rng), box(rng));
      ax = x.norm();
      ay = y.norm();
    } else if (bucket < 8) {
      ax = 3.0 * h.eps * unit(rng);
      const double g = (std::isfinite(x_hi) && ax >= x_hi) ? 0.0 : h.g(std::min(ax, x_hi));
      ay = g * (1.0 + 2e-3 * (unit(rng) - 0.5)) + 1e-3 * unit(rng);
      if (bucket >= 6) ay = 2.0 * std::max(g, 1.0) * unit(rng);
    } else {
      ax = h.sigma * unit(rng);
      ay = 10.0 * unit(rng);
    }
    ++rep.samples;
    const bool in_body = h.membership(ax, ay) <= 0.0;
    if ((in_d(ax, ay) || ax <= h.sigma) && !in_body) ++rep.lower_violations;
    if (in_body && ax >= h.eps && outside_d_closure(ax, ay)) ++rep.upper_violations;
  }
  return rep;
}

}  // namespace handle_forge
