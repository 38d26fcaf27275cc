#include "handle_forge/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "handle_forge/error.hpp"

namespace handle_forge {

namespace {

struct Window {
  std::size_t left = 0;  // breakpoint between segments left and left + 1
  double b = 0.0;
  double r = 0.0;
  double slope_jump = 0.0;
  double curv_jump = 0.0;
  // Quintic Hermite between the outer jets instead of the curvature blend.
  bool bridge = false;
  // Value of the blend correction at the right window edge.
  double end_offset() const { return bridge ? 0.0 : curv_jump * 4.0 * r * r / 56.0; }
};

bool finite_jet(const Jet& j) {
  return std::isfinite(j.value) && std::isfinite(j.d1) && std::isfinite(j.d2);
}

double length(const Segment& s) { return s.hi - s.lo; }

Segment trimmed(const Segment& s, double lo, double hi, double extra_shift) {
  Segment out = s;
  out.lo = lo;
  out.hi = hi;
  out.shift += extra_shift;
  return out;
}

Segment window_segment(const Window& w, const Segment& left, const Segment& right,
                       double shift, double offset) {
  if (w.bridge) {
    Jet a = left.jet(w.b - w.r);
    Jet c = right.jet(w.b + w.r);
    a.value += shift;
    c.value += shift;
    const double xs[2] = {w.b - w.r, w.b + w.r};
    const Jet jets[2] = {a, c};
    return quintic_hermite(xs, jets).segments().front();
  }
  Segment m;
  m.kind = SegmentKind::Mollified;
  m.lo = w.b - w.r;
  m.hi = w.b + w.r;
  m.coeffs = {w.b, w.r, w.slope_jump, w.curv_jump};
  if (offset != 0.0) m.coeffs.push_back(offset);
  Segment l = left;
  Segment r = right;
  l.shift += shift;
  r.shift += shift;
  m.parts = {std::move(l), std::move(r)};
  return m;
}

}  // namespace

SmoothingResult mollify_breakpoints(const RadialProfile& p, const SmoothingOptions& opts) {
  const auto segs = p.segments();
  SmoothingResult result;
  std::vector<Window> windows;

  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const double b = segs[i + 1].lo;
    const Jet jl = segs[i].jet(b);
    const Jet jr = segs[i + 1].jet(b);
    if (!finite_jet(jl) || !finite_jet(jr) ||
        std::abs(jr.value - jl.value) > 1e-12 * std::max(1.0, std::abs(jl.value))) {
      result.skipped.push_back(b);
      continue;
    }
    const double j1 = jr.d1 - jl.d1;
    const double j2 = jr.d2 - jl.d2;
    const bool c1 = std::abs(j1) <= 1e-14 * std::max(1.0, std::abs(jl.d1));
    const bool c2 = std::abs(j2) <= 1e-12 * std::max({1.0, std::abs(jl.d2), std::abs(jr.d2)});
    if (c1 && c2) continue;

    const double gap = std::min(length(segs[i]), length(segs[i + 1]));
    const double r = opts.radius.value_or(opts.relative_radius * gap);
    if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "smoothing radius must be positive");
    const double ulp = std::nextafter(std::abs(b), kInf) - std::abs(b);
    if (!(r > 64.0 * ulp)) {
      result.skipped.push_back(b);
      continue;
    }
    // A one-sided curvature far beyond what the window can absorb signals a
    // singular join; bridge it by matching the jets at the window edges.
    const bool bridge = std::abs(j2) * r > 1e3 * std::max(1.0, std::abs(j1));
    windows.push_back({i, b, r, c1 ? 0.0 : j1, c2 ? 0.0 : j2, bridge});
  }

  // Each segment must keep a nonempty core between its two windows.
  std::vector<double> used(segs.size(), 0.0);
  for (const Window& w : windows) {
    used[w.left] += w.r;
    used[w.left + 1] += w.r;
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!(used[i] < length(segs[i]))) {
      std::ostringstream os;
      os << "smoothing windows cover segment [" << segs[i].lo << ", " << segs[i].hi << "]";
      fail(ErrorCode::RadiusTooLarge, os.str());
    }
  }

  std::vector<const Window*> after(segs.size(), nullptr);  // window to the right of segment i
  std::vector<const Window*> before(segs.size(), nullptr);
  for (const Window& w : windows) {
    after[w.left] = &w;
    before[w.left + 1] = &w;
  }
  const auto core = [&](std::size_t i, double shift) {
    const double lo = before[i] ? before[i]->b + before[i]->r : segs[i].lo;
    const double hi = after[i] ? after[i]->b - after[i]->r : segs[i].hi;
    return trimmed(segs[i], lo, hi, shift);
  };

  std::vector<Segment> out;
  out.reserve(segs.size() + windows.size());
  double offset = 0.0;
  if (opts.anchor == Anchor::Left) {
    for (std::size_t i = 0; i < segs.size(); ++i) {
      out.push_back(core(i, offset));
      if (const Window* w = after[i]) {
        out.push_back(window_segment(*w, segs[i], segs[i + 1], offset, 0.0));
        offset += w->end_offset();
        result.max_value_shift = std::max(result.max_value_shift, std::abs(offset));
      }
    }
  } else {
    for (std::size_t i = segs.size(); i-- > 0;) {
      out.push_back(core(i, offset));
      if (const Window* w = before[i]) {
        out.push_back(window_segment(*w, segs[i - 1], segs[i], offset, -w->end_offset()));
        offset -= w->end_offset();
        result.max_value_shift = std::max(result.max_value_shift, std::abs(offset));
      }
    }
    std::reverse(out.begin(), out.end());
  }

  for (const Window& w : windows) {
    result.smoothed.push_back(w.b);
    result.radii.push_back(w.r);
  }
  const Continuity c = result.skipped.empty() ? Continuity::C2 : p.continuity();
  result.profile = RadialProfile(std::move(out), windows.empty() ? p.continuity() : c);
  return result;
}

Certification reverify(const RadialProfile& p, Condition condition, ClassKind expected, double lo,
                       double hi, const GridOptions& grid) {
  Certification c;
  c.expected = expected;
  c.classification = classify(p, condition, lo, hi, grid);
  c.passed = c.classification.kind == expected && c.classification.worst_margin > 0.0;
  return c;
}

SmoothedCertification smooth_and_certify(const RadialProfile& p, Condition condition,
                                         ClassKind expected, double lo, double hi,
                                         const GridOptions& grid, SmoothingOptions opts,
                                         int max_halvings, double max_relative_loss) {
  SmoothedCertification out;
  out.before = reverify(p, condition, expected, lo, hi, grid);
  const double budget = max_relative_loss * out.before.classification.worst_margin;
  for (int h = 0;; ++h) {
    out.halvings = h;
    out.smoothing = mollify_breakpoints(p, opts);
    out.after = reverify(out.smoothing.profile, condition, expected, lo, hi, grid);
    out.margin_loss =
        out.before.classification.worst_margin - out.after.classification.worst_margin;
    out.passed = out.before.passed && out.after.passed && out.margin_loss < budget;
    if (out.passed || h >= max_halvings) break;
    if (opts.radius) {
      *opts.radius *= 0.5;
    } else {
      opts.relative_radius *= 0.5;
    }
  }
  return out;
}

}  // namespace handle_forge
