#include <algorithm>
#include <cmath>
#include <string>

#include "handle_forge/error.hpp"
#include "handle_forge/profile.hpp"

namespace handle_forge {

namespace {

Segment make_segment(SegmentKind kind, double lo, double hi, std::vector<double> coeffs,
                     double shift = 0.0) {
  Segment s;
  s.kind = kind;
  s.lo = lo;
  s.hi = hi;
  s.coeffs = std::move(coeffs);
  s.shift = shift;
  return s;
}

Segment wrap(SegmentKind kind, double lo, double hi, Segment inner,
             std::vector<double> coeffs = {}) {
  Segment s = make_segment(kind, lo, hi, std::move(coeffs));
  s.parts.push_back(std::move(inner));
  return s;
}

Continuity upgraded(Continuity c) {
  switch (c) {
    case Continuity::C0:
      return Continuity::C1PiecewiseC2;
    default:
      return Continuity::C2;
  }
}

// Antiderivative with zero constant; the caller fixes shifts for continuity.
Segment antiderivative(const Segment& s) {
  switch (s.kind) {
    case SegmentKind::Constant:
      return make_segment(SegmentKind::Polynomial, s.lo, s.hi, {s.lo, 0.0, s.coeffs.at(0) + s.shift});
    case SegmentKind::Polynomial: {
      std::vector<double> c{s.coeffs.at(0), 0.0};
      for (std::size_t i = 1; i < s.coeffs.size(); ++i) {
        double ci = s.coeffs[i] + (i == 1 ? s.shift : 0.0);
        c.push_back(ci / static_cast<double>(i));
      }
      return make_segment(SegmentKind::Polynomial, s.lo, s.hi, std::move(c));
    }
    case SegmentKind::SqrtQuadraticSlope:
      if (s.shift != 0.0) break;
      return make_segment(SegmentKind::SqrtQuadratic, s.lo, s.hi, s.coeffs);
    case SegmentKind::LogSlope:
      if (s.lo < 0.0) break;
      return make_segment(SegmentKind::LogIntegral, s.lo, s.hi,
                          {s.coeffs.at(0) + s.shift, s.coeffs.at(1)});
    case SegmentKind::InvSqrtSlope:
      if (s.shift != 0.0 || s.lo < s.coeffs.at(0)) break;
      return make_segment(SegmentKind::SqrtIntegral, s.lo, s.hi, s.coeffs);
    default:
      break;
  }
  fail(ErrorCode::IntegrationError,
       "no closed-form antiderivative for a " + std::string(to_string(s.kind)) + " segment");
}

double end_value(const Segment& s, bool upper) {
  return s.value(upper ? s.hi : s.lo);
}

}  // namespace

RadialProfile sqrt_quadratic(double lambda, double a) {
  double lo = 0.0;
  double hi = kInf;
  if (a > 0.0) {
    if (lambda < 0.0) hi = std::sqrt(-a / lambda);
  } else if (lambda > 0.0) {
    lo = std::sqrt(-a / lambda);
  } else {
    fail(ErrorCode::DomainEmpty, "lambda t^2 + a is never positive for t >= 0");
  }
  return RadialProfile({make_segment(SegmentKind::SqrtQuadratic, lo, hi, {lambda, a, 1.0})},
                       Continuity::C2);
}

RadialProfile constant_profile(double c, double lo, double hi) {
  return RadialProfile({make_segment(SegmentKind::Constant, lo, hi, {c})}, Continuity::C2);
}

RadialProfile cubic_spline(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) fail(ErrorCode::InvalidArgument, "spline needs >= 2 matching knots");
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = xs[i + 1] - xs[i];
    if (!(h[i] > 0.0)) fail(ErrorCode::InvalidArgument, "spline knots must increase strictly");
  }
  // Thomas algorithm for the natural spline second derivatives.
  std::vector<double> m(n, 0.0), diag(n, 1.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lower = h[i - 1];
    diag[i] = 2.0 * (h[i - 1] + h[i]);
    upper[i] = h[i];
    rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 1; i-- > 1;) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];

  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double b = (ys[i + 1] - ys[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    segs.push_back(make_segment(SegmentKind::Polynomial, xs[i], xs[i + 1],
                                {xs[i], ys[i], b, 0.5 * m[i], (m[i + 1] - m[i]) / (6.0 * h[i])}));
  }
  return RadialProfile(std::move(segs), Continuity::C2);
}

RadialProfile quintic_hermite(std::span<const double> xs, std::span<const Jet> jets) {
  const std::size_t n = xs.size();
  if (n < 2 || jets.size() != n) fail(ErrorCode::InvalidArgument, "Hermite data needs >= 2 matching knots");
  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = xs[i + 1] - xs[i];
    if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "Hermite knots must increase strictly");
    const Jet& p = jets[i];
    const Jet& q = jets[i + 1];
    const double A = q.value - (p.value + p.d1 * h + 0.5 * p.d2 * h * h);
    const double B = q.d1 - (p.d1 + p.d2 * h);
    const double C = q.d2 - p.d2;
    const double h2 = h * h, h3 = h2 * h;
    const double c3 = (20.0 * A - 8.0 * B * h + C * h2) / (2.0 * h3);
    const double c4 = (-30.0 * A + 14.0 * B * h - 2.0 * C * h2) / (2.0 * h3 * h);
    const double c5 = (12.0 * A - 6.0 * B * h + C * h2) / (2.0 * h3 * h2);
    segs.push_back(make_segment(SegmentKind::Polynomial, xs[i], xs[i + 1],
                                {xs[i], p.value, p.d1, 0.5 * p.d2, c3, c4, c5}));
  }
  return RadialProfile(std::move(segs), Continuity::C2);
}

RadialProfile integrate_derivative(const RadialProfile& fprime, double anchor_t,
                                   double anchor_value) {
  const auto src = fprime.segments();
  std::vector<Segment> segs;
  segs.reserve(src.size());
  for (const Segment& s : src) segs.push_back(antiderivative(s));

  const std::size_t a = fprime.segment_index(anchor_t);
  segs[a].shift = anchor_value - segs[a].value(anchor_t);
  for (std::size_t i = a + 1; i < segs.size(); ++i) {
    segs[i].shift = 0.0;
    segs[i].shift = end_value(segs[i - 1], true) - end_value(segs[i], false);
  }
  for (std::size_t i = a; i-- > 0;) {
    segs[i].shift = 0.0;
    segs[i].shift = end_value(segs[i + 1], false) - end_value(segs[i], true);
  }
  return RadialProfile(std::move(segs), upgraded(fprime.continuity()));
}

RadialProfile theta_of_f(const RadialProfile& f) {
  std::vector<Segment> segs;
  for (const Segment& s : f.segments()) {
    const double hi_probe = std::isfinite(s.hi) ? s.hi : s.lo;
    if (!(s.value(s.lo) > 0.0) || !(s.value(hi_probe) > 0.0)) {
      fail(ErrorCode::NotPositive, "theta transform needs a positive profile");
    }
    const double lo = s.lo * s.lo;
    const double hi = s.hi * s.hi;
    // Pieces that live below sqrt(DBL_MIN) vanish after squaring; the next
    // piece then starts at the same squared radius.
    if (!(lo < hi) && &s != &f.segments().back()) continue;
    if (s.kind == SegmentKind::Constant) {
      const double c = s.coeffs.at(0) + s.shift;
      segs.push_back(make_segment(SegmentKind::Constant, lo, hi, {c * c}));
    } else if (s.kind == SegmentKind::SqrtQuadratic && s.shift == 0.0) {
      const double sc2 = s.coeffs[2] * s.coeffs[2];
      segs.push_back(make_segment(SegmentKind::Polynomial, lo, hi,
                                  {0.0, sc2 * s.coeffs[1], sc2 * s.coeffs[0]}));
    } else {
      segs.push_back(wrap(SegmentKind::ThetaOfF, lo, hi, s));
    }
  }
  return RadialProfile(std::move(segs), f.continuity());
}

RadialProfile f_of_theta(const RadialProfile& theta) {
  std::vector<Segment> segs;
  for (const Segment& s : theta.segments()) {
    const double hi_probe = std::isfinite(s.hi) ? s.hi : s.lo;
    if (!(s.value(s.lo) > 0.0) || !(s.value(hi_probe) > 0.0)) {
      fail(ErrorCode::NotPositive, "f transform needs a positive theta");
    }
    const double lo = std::sqrt(s.lo);
    const double hi = std::sqrt(s.hi);
    if (s.kind == SegmentKind::Constant) {
      segs.push_back(make_segment(SegmentKind::Constant, lo, hi, {std::sqrt(s.coeffs.at(0) + s.shift)}));
    } else if (s.kind == SegmentKind::Polynomial && s.coeffs.size() <= 3) {
      const double c0 = s.coeffs.at(1) + s.shift;
      const double c1 = s.coeffs.size() > 2 ? s.coeffs[2] : 0.0;
      segs.push_back(make_segment(SegmentKind::SqrtQuadratic, lo, hi,
                                  {c1, c0 - c1 * s.coeffs[0], 1.0}));
    } else {
      segs.push_back(wrap(SegmentKind::FOfTheta, lo, hi, s));
    }
  }
  return RadialProfile(std::move(segs), theta.continuity());
}

RadialProfile restricted(const RadialProfile& p, double lo, double hi) {
  std::vector<Segment> segs;
  for (const Segment& s : p.segments()) {
    if (s.hi <= lo || s.lo >= hi) continue;
    Segment clipped = s;
    clipped.lo = std::max(s.lo, lo);
    clipped.hi = std::min(s.hi, hi);
    segs.push_back(std::move(clipped));
  }
  if (segs.empty()) fail(ErrorCode::DomainEmpty, "restriction window misses the profile domain");
  return RadialProfile(std::move(segs), p.continuity());
}

RadialProfile scaled(const RadialProfile& p, double sx, double sy) {
  if (!(sx > 0.0)) fail(ErrorCode::InvalidArgument, "horizontal scale must be positive");
  if (sx == 1.0 && sy == 1.0) return p;
  std::vector<Segment> segs;
  for (const Segment& s : p.segments()) {
    segs.push_back(wrap(SegmentKind::Scaled, s.lo * sx, s.hi * sx, s, {sx, sy}));
  }
  return RadialProfile(std::move(segs), p.continuity());
}

Segment inverse_segment(const Segment& forward) {
  if (!std::isfinite(forward.hi)) {
    fail(ErrorCode::NotInvertible, "inverse segments need a bounded forward interval");
  }
  const double va = forward.value(forward.lo);
  const double vb = forward.value(forward.hi);
  if (!(va != vb) || !std::isfinite(va) || !std::isfinite(vb)) {
    fail(ErrorCode::NotInvertible, "forward segment is not strictly monotone");
  }
  const double lo = std::min(va, vb);
  const double hi = std::max(va, vb);

  if (forward.kind == SegmentKind::SqrtIntegral) {
    const double sigma = forward.coeffs.at(0);
    const double k = forward.coeffs.at(1);
    return make_segment(SegmentKind::Polynomial, lo, hi,
                        {forward.shift, sigma, 0.0, 1.0 / (4.0 * k * k)});
  }
  if (forward.kind == SegmentKind::SqrtQuadratic && forward.shift == 0.0 &&
      forward.coeffs.at(0) > 0.0 && forward.coeffs.at(2) > 0.0) {
    const double lam = forward.coeffs[0];
    const double sc = forward.coeffs[2];
    return make_segment(SegmentKind::SqrtQuadratic, lo, hi,
                        {1.0 / (sc * sc * lam), -forward.coeffs[1] / lam, 1.0});
  }
  if (forward.kind == SegmentKind::Constant) {
    fail(ErrorCode::NotInvertible, "constant segment has no inverse");
  }
  return wrap(SegmentKind::Inverse, lo, hi, forward);
}

}  // namespace handle_forge
