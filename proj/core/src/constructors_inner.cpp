#include <algorithm>
#include <cmath>

#include "constructors_detail.hpp"

namespace handle_forge {

using detail::segment;

namespace {

void check_inner_args(double lambda, double eps) {
  if (!(lambda < 1.0)) fail(ErrorCode::WrongRegime, "inner handles need lambda < 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  if (!(lambda * eps * eps + 1.0 > 0.0)) {
    fail(ErrorCode::EpsilonTooLarge, "eps lies beyond the zero of lambda t^2 + 1");
  }
}

}  // namespace

InnerConstants derive_constants_inner(double lambda, double eps, std::optional<double> eta) {
  check_inner_args(lambda, eps);
  const double g = std::sqrt(lambda * eps * eps + 1.0);
  const double gp = lambda * eps / g;

  InnerConstants k;
  k.lambda = lambda;
  k.eps = eps;
  k.k = 0.5 * (lambda / g + 1.0);
  k.c = gp - k.k * eps;

  if (eta) {
    if (!(*eta > 0.0) || !(*eta < eps)) fail(ErrorCode::InvalidArgument, "eta must lie in (0, eps)");
    k.eta = *eta;
    k.c1 = k.c + k.k * k.eta;
    if (!(k.c1 < 0.0)) fail(ErrorCode::EpsilonTooLarge, "slope c1 must be negative");
  } else {
    double e = 0.5 * std::min(eps, 1.0);
    bool found = false;
    for (int i = 0; i < 200 && e > 0.0; ++i, e *= 0.5) {
      const double c1 = k.c + k.k * e;
      if (c1 < 0.0 && e + c1 * c1 * c1 < 0.0) {
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorCode::EpsilonTooLarge, "no eta with c + k eta < 0 and eta + c1^3 < 0");
    k.eta = e;
    k.c1 = k.c + k.k * e;
  }
  if (!(k.c1 > -2.0)) fail(ErrorCode::DegenerateConstants, "slope c1 reaches -2");
  k.log_sigma = std::log(k.eta / 2.0) - (k.c1 + 2.0) / k.eta;
  k.sigma = std::exp(k.log_sigma);
  k.sigma_effective = k.sigma;
  if (k.log_sigma < std::log(kSigmaFloor)) {
    const double m = k.eta * (std::log(k.eta) - std::log(2.0 * kSigmaFloor)) - k.c1;
    k.junction_slope = m;
    k.sigma_effective = m >= kMinJunctionSlope ? kSigmaFloor : 0.0;
  }
  return k;
}

namespace {

struct InnerProfiles {
  RadialProfile fprime;
  RadialProfile f;
  RadialProfile inverse;
  double branch_end = 0.0;
  bool collapsed = false;
};

InnerProfiles inner_profiles(const InnerConstants& k) {
  const double sig = k.sigma_effective;
  const double g = std::sqrt(k.lambda * k.eps * k.eps + 1.0);
  const double gp = k.lambda * k.eps / g;
  const double hi = k.lambda < 0.0 ? 1.0 / std::sqrt(-k.lambda) : kInf;

  InnerProfiles out;
  out.fprime = RadialProfile(
      {segment(SegmentKind::InvSqrtSlope, sig, 2.0 * sig, {sig, -k.junction_slope * std::sqrt(sig)}),
       segment(SegmentKind::LogSlope, 2.0 * sig, k.eta, {k.c1 - k.eta * std::log(k.eta), k.eta}),
       segment(SegmentKind::Polynomial, k.eta, k.eps, {k.eps, gp, k.k}),
       segment(SegmentKind::SqrtQuadraticSlope, k.eps, hi, {k.lambda, 1.0, 1.0})},
      Continuity::C0);
  out.f = integrate_derivative(out.fprime, k.eps, g);

  // f' vanishes at eps - g'(eps) / k when that lies inside the polynomial piece.
  const double t_star = k.k != 0.0 ? k.eps - gp / k.k : kInf;
  out.branch_end = (t_star > k.eta && t_star < k.eps) ? t_star : k.eps;

  const auto fs = out.f.segments();
  const double u_end = fs[2].value(out.branch_end);
  const double u_eta = fs[2].value(k.eta);
  const double u_2sig = fs[1].value(2.0 * sig);
  const double u_sig = fs[0].value(sig);
  out.collapsed = !(u_sig > u_2sig);

  std::vector<Segment> inv;
  Segment poly_part = inverse_segment(detail::restricted(fs[2], k.eta, out.branch_end));
  poly_part.lo = u_end;
  poly_part.hi = u_eta;
  inv.push_back(std::move(poly_part));
  Segment log_part = inverse_segment(fs[1]);
  log_part.lo = u_eta;
  log_part.hi = out.collapsed ? u_sig : u_2sig;
  inv.push_back(std::move(log_part));
  if (!out.collapsed) {
    Segment near = inverse_segment(fs[0]);
    near.lo = u_2sig;
    near.hi = u_sig;
    inv.push_back(std::move(near));
  }
  inv.push_back(segment(SegmentKind::Constant, u_sig, kInf, {sig}));
  out.inverse = RadialProfile(std::move(inv),
                              out.collapsed ? Continuity::C0 : Continuity::C1PiecewiseC2);
  return out;
}

double f_upper(const InnerConstants& k) {
  const double hi = k.lambda < 0.0 ? 1.0 / std::sqrt(-k.lambda) : kInf;
  return std::min(2.0 * k.eps, 0.5 * (k.eps + hi));
}

struct InnerCheck {
  Certification f;
  Certification inverse;
  bool passed() const { return f.passed && inverse.passed; }
};

InnerCheck certify_inner(const InnerConstants& k, const InnerProfiles& p, std::size_t grid) {
  InnerCheck c;
  c.f = reverify(p.f, Condition::FForm, ClassKind::DMinusStrong, k.sigma_effective, f_upper(k),
                 detail::open_grid(grid, false, true));
  const double u_lo = p.inverse.domain_lo();
  const double u_flat = p.inverse.segments().back().lo;
  c.inverse = reverify(p.inverse, Condition::FForm, ClassKind::DMinusStrong, u_lo,
                       2.0 * u_flat - u_lo, detail::open_grid(grid, false, true));
  return c;
}

HandleConstruction assemble_inner(const InnerConstants& k, int relax_steps,
                                  const HandleOptions& opts) {
  if (!(k.sigma_effective > 0.0)) {
    fail(ErrorCode::DegenerateConstants,
         "sigma = exp(" + std::to_string(k.log_sigma) +
             ") is below double range; enable relax or choose another eps");
  }
  InnerProfiles p = inner_profiles(k);

  HandleConstruction h;
  h.kind = HandleKind::Inner;
  h.lambda = k.lambda;
  h.a = 1.0;
  h.eps = k.eps;
  h.c = k.c;
  h.eta = k.eta;
  h.c1 = k.c1;
  h.log_sigma = k.log_sigma;
  h.sigma = k.sigma_effective;
  h.junction_slope = k.junction_slope;
  h.k = k.k;
  h.relax_steps = relax_steps;
  h.collapsed = p.collapsed;
  h.branch_end = p.branch_end;

  const InnerCheck check = certify_inner(k, p, opts.grid);
  h.f_certificate = check.f;
  h.inverse_certificate = check.inverse;

  // Anchoring on the right keeps f = g exactly past the last window.
  SmoothingOptions sm = opts.smoothing.value_or(SmoothingOptions{});
  sm.anchor = Anchor::Right;
  h.smoothing_certificate =
      smooth_and_certify(p.f, Condition::FForm, ClassKind::DMinusStrong, k.sigma_effective, f_upper(k),
                         detail::open_grid(opts.grid, false, true), sm);
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
         detail::describe_failure("smoothed f", h.smoothing_certificate.after));
  }
  return h;
}

}  // namespace

HandleConstruction build_inner_handle(double lambda, double eps, const HandleOptions& opts) {
  if (!opts.relax) return assemble_inner(derive_constants_inner(lambda, eps, opts.eta), 0, opts);

  // Same doubling policy as the outer handle; the eta + c1^3 < 0 bound is
  // dropped and only c1 < 0 plus grid certification are kept.
  const InnerConstants base = derive_constants_inner(lambda, eps);
  std::optional<InnerConstants> best;
  int best_steps = 0;
  for (int j = 0; j < 64; ++j) {
    InnerConstants k;
    try {
      k = derive_constants_inner(lambda, eps, base.eta * std::ldexp(1.0, j));
    } catch (const Error&) {
      break;
    }
    if (!(k.sigma_effective > 0.0)) continue;
    const InnerProfiles p = inner_profiles(k);
    if (!certify_inner(k, p, opts.grid).passed()) {
      if (best) break;
      continue;
    }
    best = k;
    best_steps = j;
  }
  if (!best) {
    fail(ErrorCode::DegenerateConstants, "no enlarged eta gives a representable certified sigma");
  }
  return assemble_inner(*best, best_steps, opts);
}

}  // namespace handle_forge
