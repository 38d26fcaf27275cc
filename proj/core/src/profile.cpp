#include "handle_forge/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "handle_forge/error.hpp"
#include "handle_forge/root_find.hpp"

namespace handle_forge {

namespace {

constexpr std::array<std::pair<SegmentKind, std::string_view>, 14> kKindNames{{
    {SegmentKind::Constant, "constant"},
    {SegmentKind::Polynomial, "polynomial"},
    {SegmentKind::SqrtQuadratic, "sqrt_quadratic"},
    {SegmentKind::SqrtQuadraticSlope, "sqrt_quadratic_slope"},
    {SegmentKind::LogSlope, "log_slope"},
    {SegmentKind::LogIntegral, "log_integral"},
    {SegmentKind::InvSqrtSlope, "inv_sqrt_slope"},
    {SegmentKind::SqrtIntegral, "sqrt_integral"},
    {SegmentKind::CapMiddle, "cap_middle"},
    {SegmentKind::Inverse, "inverse"},
    {SegmentKind::ThetaOfF, "theta_of_f"},
    {SegmentKind::FOfTheta, "f_of_theta"},
    {SegmentKind::Scaled, "scaled"},
    {SegmentKind::Mollified, "mollified"},
}};

constexpr std::array<std::pair<Continuity, std::string_view>, 4> kContinuityNames{{
    {Continuity::C0, "C0"},
    {Continuity::C1, "C1"},
    {Continuity::C1PiecewiseC2, "C1_piecewise_C2"},
    {Continuity::C2, "C2"},
}};

void require_coeffs(const Segment& s, std::size_t n) {
  if (s.coeffs.size() < n) {
    fail(ErrorCode::FormatError, std::string(to_string(s.kind)) + " segment needs " +
                                     std::to_string(n) + " coefficients");
  }
}

void require_parts(const Segment& s, std::size_t n) {
  if (s.parts.size() != n) {
    fail(ErrorCode::FormatError, std::string(to_string(s.kind)) + " segment needs " +
                                     std::to_string(n) + " parts");
  }
}

Jet polynomial_jet(std::span<const double> c, double t_ref, double t) {
  const double d = t - t_ref;
  Jet j;
  for (std::size_t i = c.size(); i-- > 0;) {
    j.d2 = j.d2 * d + 2.0 * j.d1;
    j.d1 = j.d1 * d + j.value;
    j.value = j.value * d + c[i];
  }
  return j;
}

// Quintic smoothstep and its antiderivatives, all vanishing at 0.
double smooth_step(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
double smooth_step_d(double x) { return 30.0 * x * x * (1.0 + x * (-2.0 + x)); }
double smooth_step_i1(double x) { return x * x * x * x * (2.5 + x * (-3.0 + x)); }
double smooth_step_i2(double x) {
  return x * x * x * x * x * (0.5 + x * (-0.5 + x / 7.0));
}

Jet mollified_jet(const Segment& s, double t) {
  require_coeffs(s, 4);
  require_parts(s, 2);
  const double b = s.coeffs[0];
  const double r = s.coeffs[1];
  const double slope_jump = s.coeffs[2];
  const double curv_jump = s.coeffs[3];
  const double width = 2.0 * r;
  const double x = std::clamp((t - (b - r)) / width, 0.0, 1.0);
  const bool right = t >= b;
  const Jet base = right ? s.parts[1].jet(t) : s.parts[0].jet(t);
  const double step = right ? 1.0 : 0.0;
  const double ramp = right ? x - 0.5 : 0.0;

  Jet e;
  e.value = slope_jump * width * (smooth_step_i1(x) - ramp) +
            curv_jump * width * width * (smooth_step_i2(x) - 0.5 * ramp * ramp);
  e.d1 = slope_jump * (smooth_step(x) - step) +
         curv_jump * width * (smooth_step_i1(x) - ramp);
  e.d2 = slope_jump * smooth_step_d(x) / width + curv_jump * (smooth_step(x) - step);
  if (s.coeffs.size() > 4) e.value += s.coeffs[4];
  return {base.value + e.value, base.d1 + e.d1, base.d2 + e.d2};
}

Jet inverse_jet(const Segment& s, double u) {
  require_parts(s, 1);
  const Segment& fwd = s.parts[0];
  const auto fn = [&fwd](double t) {
    const Jet j = fwd.jet(t);
    return ValueSlope{j.value, j.d1};
  };
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u));
  // Breakpoint values of neighbouring segments may differ from this segment's
  // own end values by rounding; snap such targets to the nearer end.
  const double v_lo = fwd.value(fwd.lo);
  const double v_hi = fwd.value(fwd.hi);
  const double snap = 1e-12 * std::max({1.0, std::abs(v_lo), std::abs(v_hi)});
  double x = 0.0;
  if (std::abs(u - v_lo) <= snap && (u - v_lo) * (v_hi - v_lo) <= 0.0) {
    x = fwd.lo;
  } else if (std::abs(u - v_hi) <= snap && (u - v_hi) * (v_lo - v_hi) <= 0.0) {
    x = fwd.hi;
  } else {
    x = solve_monotone(fn, fwd.lo, fwd.hi, u, tol).t;
  }
  const Jet j = fwd.jet(x);
  const RootResult root{x, j.value - u, 0};
  Jet out;
  out.value = root.t;
  if (!std::isfinite(j.d1)) {
    out.d1 = 0.0;
    out.d2 = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.d1 = 1.0 / j.d1;
    out.d2 = -(j.d2 / j.d1) / (j.d1 * j.d1);
  }
  return out;
}

}  // namespace

std::string_view to_string(SegmentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

SegmentKind segment_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  fail(ErrorCode::FormatError, "unknown segment kind '" + std::string(name) + "'");
}

std::string_view to_string(Continuity c) {
  for (const auto& [k, name] : kContinuityNames) {
    if (k == c) return name;
  }
  return "unknown";
}

Continuity continuity_from_string(std::string_view name) {
  for (const auto& [k, n] : kContinuityNames) {
    if (n == name) return k;
  }
  fail(ErrorCode::FormatError, "unknown continuity class '" + std::string(name) + "'");
}

Jet theta_jet_from_f(const Jet& f, double t) {
  Jet th;
  th.value = f.value * f.value;
  if (t == 0.0) {
    // Limits for an even profile (f'(0) = 0); theta'' would need f'''.
    th.d1 = f.d1 == 0.0 ? f.value * f.d2 : std::copysign(kInf, f.value * f.d1);
    th.d2 = std::numeric_limits<double>::quiet_NaN();
    return th;
  }
  const double ffp_t = f.value * f.d1 / t;
  th.d1 = ffp_t;
  th.d2 = (f.value * f.d2 + f.d1 * f.d1 - ffp_t) / (2.0 * t * t);
  return th;
}

Jet f_jet_from_theta(const Jet& theta, double t) {
  Jet f;
  f.value = std::sqrt(theta.value);
  f.d1 = t * theta.d1 / f.value;
  f.d2 = (theta.d1 + 2.0 * t * t * theta.d2 - f.d1 * f.d1) / f.value;
  return f;
}

Jet Segment::jet(double t) const {
  Jet j;
  switch (kind) {
    case SegmentKind::Constant:
      require_coeffs(*this, 1);
      j = {coeffs[0], 0.0, 0.0};
      break;
    case SegmentKind::Polynomial:
      require_coeffs(*this, 2);
      j = polynomial_jet(std::span<const double>(coeffs).subspan(1), coeffs[0], t);
      break;
    case SegmentKind::SqrtQuadratic: {
      require_coeffs(*this, 3);
      const double lam = coeffs[0], a = coeffs[1], sc = coeffs[2];
      if (a == 0.0) {
        const double rl = std::sqrt(lam);
        j = {sc * rl * t, sc * rl, 0.0};
      } else {
        const double g = std::sqrt(lam * t * t + a);
        j = {sc * g, sc * lam * t / g, sc * lam * a / (g * g * g)};
      }
      break;
    }
    case SegmentKind::SqrtQuadraticSlope: {
      require_coeffs(*this, 3);
      const double lam = coeffs[0], a = coeffs[1], sc = coeffs[2];
      if (a == 0.0) {
        j = {sc * std::sqrt(lam), 0.0, 0.0};
      } else {
        const double g = std::sqrt(lam * t * t + a);
        const double g3 = g * g * g;
        j = {sc * lam * t / g, sc * lam * a / g3, -3.0 * sc * lam * lam * a * t / (g3 * g * g)};
      }
      break;
    }
    case SegmentKind::LogSlope: {
      require_coeffs(*this, 2);
      const double alpha = coeffs[0], beta = coeffs[1];
      j = {alpha + beta * std::log(t), beta / t, -beta / (t * t)};
      break;
    }
    case SegmentKind::LogIntegral: {
      require_coeffs(*this, 2);
      const double alpha = coeffs[0], beta = coeffs[1];
      const double logt = std::log(t);
      const double tlogt = t == 0.0 ? 0.0 : t * logt;
      j = {alpha * t + beta * (tlogt - t), alpha + beta * logt, beta / t};
      break;
    }
    case SegmentKind::InvSqrtSlope: {
      require_coeffs(*this, 2);
      const double d = t - coeffs[0];
      const double v = coeffs[1] / std::sqrt(d);
      j = {v, -0.5 * v / d, 0.75 * (v / d) / d};
      break;
    }
    case SegmentKind::SqrtIntegral: {
      require_coeffs(*this, 2);
      const double d = t - coeffs[0];
      const double rd = std::sqrt(d);
      const double slope = coeffs[1] / rd;
      j = {2.0 * coeffs[1] * rd, slope, -0.5 * slope / d};
      break;
    }
    case SegmentKind::CapMiddle: {
      require_coeffs(*this, 3);
      const double delta = coeffs[0], mu = coeffs[1];
      const double rt = std::sqrt(t), r0 = std::sqrt(coeffs[2]);
      const double diff = rt - r0;
      j = {delta * t + mu * diff * diff, delta + mu * (1.0 - r0 / rt),
           0.5 * mu * r0 / (t * rt)};
      break;
    }
    case SegmentKind::Inverse:
      j = inverse_jet(*this, t);
      break;
    case SegmentKind::ThetaOfF: {
      require_parts(*this, 1);
      const double rt = std::sqrt(t);
      j = theta_jet_from_f(parts[0].jet(rt), rt);
      break;
    }
    case SegmentKind::FOfTheta:
      require_parts(*this, 1);
      j = f_jet_from_theta(parts[0].jet(t * t), t);
      break;
    case SegmentKind::Scaled: {
      require_coeffs(*this, 2);
      require_parts(*this, 1);
      const double sx = coeffs[0], sy = coeffs[1];
      const Jet p = parts[0].jet(t / sx);
      j = {sy * p.value, sy / sx * p.d1, sy / (sx * sx) * p.d2};
      break;
    }
    case SegmentKind::Mollified:
      j = mollified_jet(*this, t);
      break;
  }
  j.value += shift;
  return j;
}

RadialProfile::RadialProfile(std::vector<Segment> segments, Continuity continuity)
    : segments_(std::move(segments)), continuity_(continuity) {
  if (segments_.empty()) fail(ErrorCode::InvalidArgument, "profile needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    if (!(s.lo < s.hi) || std::isnan(s.lo) || std::isnan(s.hi)) {
      std::ostringstream os;
      os << "segment " << i << " has empty interval [" << s.lo << ", " << s.hi << "]";
      fail(ErrorCode::InvalidArgument, os.str());
    }
    if (!std::isfinite(s.lo)) fail(ErrorCode::InvalidArgument, "segment lower bound must be finite");
    if (i + 1 < segments_.size()) {
      if (s.hi != segments_[i + 1].lo) {
        std::ostringstream os;
        os << "segments " << i << " and " << i + 1 << " do not abut (" << s.hi
           << " vs " << segments_[i + 1].lo << ")";
        fail(ErrorCode::InvalidArgument, os.str());
      }
    }
  }
}

std::vector<double> RadialProfile::breakpoints() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < segments_.size(); ++i) out.push_back(segments_[i].lo);
  return out;
}

bool RadialProfile::is_breakpoint(double t) const {
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    if (segments_[i].lo == t) return true;
  }
  return false;
}

std::size_t RadialProfile::segment_index(double t, Side side) const {
  if (segments_.empty()) fail(ErrorCode::OutOfDomain, "empty profile");
  if (!(t >= domain_lo() && t <= domain_hi())) {
    std::ostringstream os;
    os << "t = " << t << " outside [" << domain_lo() << ", " << domain_hi() << "]";
    fail(ErrorCode::OutOfDomain, os.str());
  }
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double v, const Segment& s) { return v < s.lo; });
  std::size_t idx = static_cast<std::size_t>(std::distance(segments_.begin(), it)) - 1;
  if (side == Side::Left && idx > 0 && segments_[idx].lo == t) --idx;
  return idx;
}

Jet RadialProfile::jet(double t, Side side) const {
  return segments_[segment_index(t, side)].jet(t);
}

Evaluation eval(const RadialProfile& p, double t, int order) {
  if (order < 0 || order > 2) fail(ErrorCode::InvalidArgument, "order must be 0, 1 or 2");
  const auto pick = [order](const Jet& j) {
    return order == 0 ? j.value : (order == 1 ? j.d1 : j.d2);
  };
  const double right = pick(p.jet(t, Side::Right));
  if (!p.is_breakpoint(t)) return {right, right, false};
  const double left = pick(p.jet(t, Side::Left));
  const bool may_jump = (order == 2 && p.continuity() != Continuity::C2) ||
                        (order >= 1 && p.continuity() == Continuity::C0);
  return {left, right, may_jump};
}

InverseValue invert_monotone(const RadialProfile& p, double u, std::optional<double> tol) {
  const double tolerance = tol.value_or(1e-12 * std::max(1.0, std::abs(u)));
  const auto segs = p.segments();

  // Boundary values, one pair per segment.
  std::vector<std::pair<double, double>> ends;
  ends.reserve(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double hi = std::isfinite(segs[i].hi) ? segs[i].hi : segs[i].lo;
    ends.emplace_back(segs[i].value(segs[i].lo), segs[i].value(hi));
  }
  const double first = ends.front().first;
  double last = ends.back().second;
  if (!std::isfinite(segs.back().hi)) {
    // Probe the unbounded tail for its direction.
    const Segment& tail = segs.back();
    last = tail.value(tail.lo + std::max(1.0, std::abs(tail.lo)));
  }
  if (first == last) fail(ErrorCode::NotMonotone, "profile is constant at its ends");
  const bool increasing = last > first;
  double prev = first;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const bool bounded = std::isfinite(segs[i].hi);
    const double a = ends[i].first, b = ends[i].second;
    if ((increasing && a < prev) || (!increasing && a > prev)) {
      fail(ErrorCode::NotMonotone, "profile values reverse direction at a breakpoint");
    }
    if (bounded && ((increasing && !(b > a)) || (!increasing && !(b < a)))) {
      fail(ErrorCode::NotMonotone, "segment " + std::to_string(i) + " is not strictly monotone");
    }
    prev = b;
  }

  const auto solve_in = [&](const Segment& s, double lo, double hi) {
    const auto fn = [&s](double t) {
      const Jet j = s.jet(t);
      return ValueSlope{j.value, j.d1};
    };
    const RootResult r = solve_monotone(fn, lo, hi, u, tolerance);
    const double slope = s.jet(r.t).d1;
    return InverseValue{r.t, std::isfinite(slope) ? 1.0 / slope : 0.0};
  };

  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    if (std::isfinite(s.hi)) {
      const double lo_v = std::min(ends[i].first, ends[i].second);
      const double hi_v = std::max(ends[i].first, ends[i].second);
      if (u >= lo_v && u <= hi_v) return solve_in(s, s.lo, s.hi);
      continue;
    }
    // Unbounded tail: expand until the target is bracketed.
    const double v0 = s.value(s.lo);
    if ((increasing && u < v0) || (!increasing && u > v0)) break;
    double step = std::max(1.0, std::abs(s.lo));
    double hi = s.lo + step;
    for (int k = 0; k < 1100; ++k) {
      const double v = s.value(hi);
      if (!std::isfinite(v)) break;
      if ((increasing && v >= u) || (!increasing && v <= u)) return solve_in(s, s.lo, hi);
      step *= 2.0;
      hi = s.lo + step;
    }
    break;
  }
  std::ostringstream os;
  os << "u = " << u << " outside the range of the profile";
  fail(ErrorCode::OutOfRange, os.str());
}

}  // namespace handle_forge
