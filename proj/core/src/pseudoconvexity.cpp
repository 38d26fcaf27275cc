#include "handle_forge/pseudoconvexity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "handle_forge/error.hpp"
#include "handle_forge/parallel.hpp"

namespace handle_forge {

namespace {

Inequality make_inequality(double lhs, double rhs) { return {lhs, rhs, rhs - lhs}; }

int sign_class(const Inequality& q, double tol) {
  double scale = 1.0;
  if (std::isfinite(q.lhs)) scale = std::max(scale, std::abs(q.lhs));
  if (std::isfinite(q.rhs)) scale = std::max(scale, std::abs(q.rhs));
  if (q.margin > tol * scale) return 1;
  if (q.margin < -tol * scale) return -1;
  return 0;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == b) return a;
  if (a == Verdict::Violated || b == Verdict::Violated) return Verdict::Violated;
  if (a == Verdict::Equality || b == Verdict::Equality) return Verdict::Equality;
  return Verdict::Violated;
}

double nan_to_low(double v) { return std::isnan(v) ? -kInf : v; }

Verdict verdict_of(const SidedReport& left, const SidedReport& right, bool split) {
  return split ? combine(left.verdict, right.verdict) : right.verdict;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::StrictHolds:
      return "StrictHolds";
    case Verdict::ReverseHolds:
      return "ReverseHolds";
    case Verdict::Equality:
      return "Equality";
    case Verdict::Violated:
      return "Violated";
  }
  return "Violated";
}

std::string_view to_string(ClassKind k) {
  switch (k) {
    case ClassKind::DMinusStrong:
      return "DMinusStrong";
    case ClassKind::DPlusStrong:
      return "DPlusStrong";
    case ClassKind::Mixed:
      return "Mixed";
    case ClassKind::BoundaryCase:
      return "BoundaryCase";
  }
  return "Mixed";
}

Verdict classify_margins(const Inequality& a, const Inequality& b, double tol) {
  if (std::isnan(a.margin) || std::isnan(b.margin)) return Verdict::Violated;
  const int sa = sign_class(a, tol);
  const int sb = sign_class(b, tol);
  if (sa == 1 && sb == 1) return Verdict::StrictHolds;
  if (sa == -1 && sb == -1) return Verdict::ReverseHolds;
  if (sa * sb < 0) return Verdict::Violated;
  return Verdict::Equality;
}

SidedReport theta_report(const Jet& th, double s, double tol) {
  if (!(th.value > 0.0)) fail(ErrorCode::NotPositive, "theta must be positive");
  SidedReport r;
  r.first = make_inequality(th.d1, 1.0);
  const double lhs = s == 0.0 ? 0.0 : 2.0 * s * th.value * th.d2;
  r.second = make_inequality(lhs, (1.0 - th.d1) * (s * th.d1 * th.d1 + th.value));
  r.residual = r.second.lhs - r.second.rhs;
  r.verdict = classify_margins(r.first, r.second, tol);
  return r;
}

SidedReport f_report(const Jet& f, double t, double tol) {
  if (!(t > 0.0)) fail(ErrorCode::OutOfDomain, "the f-form needs t > 0");
  if (!(f.value > 0.0)) fail(ErrorCode::NotPositive, "f must be positive");
  SidedReport r;
  r.first = make_inequality(f.value * f.d1 / t, 1.0);
  r.second = make_inequality(f.value * (f.d2 + f.d1 * f.d1 * f.d1 / t), 1.0);
  r.residual = r.second.lhs - 1.0;
  r.verdict = classify_margins(r.first, r.second, tol);
  return r;
}

SidedReport cap_report(const Jet& h, double t, double bound, double tol) {
  SidedReport r;
  r.first = make_inequality(h.d1, bound);
  r.second = make_inequality(2.0 * t * h.d2 + h.d1, bound);
  r.residual = r.second.lhs - r.second.rhs;
  r.verdict = classify_margins(r.first, r.second, tol);
  return r;
}

ConditionReport theta_condition(const RadialProfile& theta, double s, double tol) {
  ConditionReport r;
  r.t = s;
  r.split = theta.is_breakpoint(s);
  r.right = theta_report(theta.jet(s, Side::Right), s, tol);
  r.left = r.split ? theta_report(theta.jet(s, Side::Left), s, tol) : r.right;
  r.verdict = verdict_of(r.left, r.right, r.split);
  return r;
}

ConditionReport f_condition(const RadialProfile& f, double t, double tol) {
  ConditionReport r;
  r.t = t;
  r.split = f.is_breakpoint(t);
  r.right = f_report(f.jet(t, Side::Right), t, tol);
  r.left = r.split ? f_report(f.jet(t, Side::Left), t, tol) : r.right;
  r.verdict = verdict_of(r.left, r.right, r.split);
  return r;
}

ConditionReport evaluate_condition(const RadialProfile& p, Condition c, double t,
                                   const GridOptions& opts) {
  const auto sided = [&](Side side) {
    const Jet j = p.jet(t, side);
    switch (c) {
      case Condition::Theta:
        return theta_report(j, t, opts.tol);
      case Condition::FForm:
        if (t == 0.0) return theta_report(theta_jet_from_f(j, 0.0), 0.0, opts.tol);
        return f_report(j, t, opts.tol);
      case Condition::Cap:
        return cap_report(j, t, opts.cap_bound, opts.tol);
    }
    return SidedReport{};
  };
  ConditionReport r;
  r.t = t;
  r.split = p.is_breakpoint(t);
  r.right = sided(Side::Right);
  r.left = r.split ? sided(Side::Left) : r.right;
  r.verdict = verdict_of(r.left, r.right, r.split);
  return r;
}

std::vector<double> certification_grid(const RadialProfile& p, double lo, double hi,
                                       const GridOptions& opts) {
  if (!(lo < hi) || !std::isfinite(hi)) {
    fail(ErrorCode::InvalidArgument, "certification interval must be finite and nonempty");
  }
  if (lo < p.domain_lo() || hi > p.domain_hi()) {
    fail(ErrorCode::OutOfDomain, "certification interval leaves the profile domain");
  }
  const std::size_t n = std::max<std::size_t>(opts.n_grid, 2);
  std::vector<double> pts;
  pts.reserve(3 * n + 64);
  const double width = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(lo + width * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  if (lo > 0.0 && hi / lo > 10.0) {
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1)));
    }
  }
  for (int j = 1; j <= 10; ++j) {
    const double f = std::pow(10.0, -j);
    pts.push_back(lo + width * f);
    pts.push_back(hi - width * f);
    if (lo > 0.0) pts.push_back(lo * (1.0 + f));
  }
  for (double b : p.breakpoints()) {
    if (b >= lo && b <= hi) pts.push_back(b);
  }
  // Blend windows are narrow; sample their interiors explicitly.
  for (const Segment& s : p.segments()) {
    if (s.kind != SegmentKind::Mollified) continue;
    for (int k = 1; k < 16; ++k) pts.push_back(s.lo + (s.hi - s.lo) * k / 16.0);
  }
  std::vector<double> out;
  out.reserve(pts.size());
  for (double t : pts) {
    if (t < lo || t > hi) continue;
    if (t == lo && !opts.include_lo) continue;
    if (t == hi && !opts.include_hi) continue;
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Classification classify(const RadialProfile& p, Condition c, double lo, double hi,
                        const GridOptions& opts) {
  const std::vector<double> grid = certification_grid(p, lo, hi, opts);
  std::vector<ConditionReport> reports(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { reports[i] = evaluate_condition(p, c, grid[i], opts); });

  Classification out;
  out.points = grid.size();
  out.min_dminus_margin = kInf;
  out.min_dplus_margin = kInf;
  bool all_strict = true, all_reverse = true, any_bad = false, any_strict = false,
       any_reverse = false;
  for (const ConditionReport& r : reports) {
    if (r.split) ++out.breakpoints;
    for (const SidedReport* s : {&r.left, &r.right}) {
      const double dm = std::min(nan_to_low(s->first.margin), nan_to_low(s->second.margin));
      const double dp = std::min(nan_to_low(-s->first.margin), nan_to_low(-s->second.margin));
      if (dm < out.min_dminus_margin) {
        out.min_dminus_margin = dm;
        out.min_dminus_t = r.t;
      }
      if (dp < out.min_dplus_margin) {
        out.min_dplus_margin = dp;
        out.min_dplus_t = r.t;
      }
    }
    all_strict = all_strict && r.verdict == Verdict::StrictHolds;
    all_reverse = all_reverse && r.verdict == Verdict::ReverseHolds;
    any_strict = any_strict || r.verdict == Verdict::StrictHolds;
    any_reverse = any_reverse || r.verdict == Verdict::ReverseHolds;
    any_bad = any_bad || r.verdict == Verdict::Violated;
  }
  if (all_strict) {
    out.kind = ClassKind::DMinusStrong;
  } else if (all_reverse) {
    out.kind = ClassKind::DPlusStrong;
  } else if (any_bad || (any_strict && any_reverse)) {
    out.kind = ClassKind::Mixed;
  } else {
    out.kind = ClassKind::BoundaryCase;
  }
  const bool plus_side = out.kind == ClassKind::DPlusStrong ||
                         (out.kind != ClassKind::DMinusStrong &&
                          out.min_dplus_margin > out.min_dminus_margin);
  out.worst_margin = plus_side ? out.min_dplus_margin : out.min_dminus_margin;
  out.worst_t = plus_side ? out.min_dplus_t : out.min_dminus_t;
  if (opts.keep_reports) out.reports = std::move(reports);
  return out;
}

DualityReport duality_check(const RadialProfile& theta, double s) {
  const Jet th = theta.jet(s);
  if (th.d1 == 0.0) fail(ErrorCode::NotInvertible, "theta' vanishes; no local inverse");
  const Jet tau{s, 1.0 / th.d1, -th.d2 / (th.d1 * th.d1 * th.d1)};
  DualityReport r;
  r.s = s;
  r.u = th.value;
  r.theta_verdict = theta_report(th, s).verdict;
  r.tau_verdict = theta_report(tau, th.value).verdict;
  Verdict expected = r.theta_verdict;
  if (th.d1 > 0.0) {
    if (expected == Verdict::StrictHolds) {
      expected = Verdict::ReverseHolds;
    } else if (expected == Verdict::ReverseHolds) {
      expected = Verdict::StrictHolds;
    }
  }
  r.consistent = expected == r.tau_verdict;
  return r;
}

nlohmann::json to_json(const SidedReport& r) {
  const auto ineq = [](const Inequality& q) {
    return nlohmann::json{{"lhs", q.lhs}, {"rhs", q.rhs}, {"margin", q.margin}};
  };
  return {{"first", ineq(r.first)},
          {"second", ineq(r.second)},
          {"residual", r.residual},
          {"verdict", std::string(to_string(r.verdict))}};
}

nlohmann::json to_json(const ConditionReport& r) {
  nlohmann::json j{{"t", r.t}, {"verdict", std::string(to_string(r.verdict))}};
  if (r.split) {
    j["left"] = to_json(r.left);
    j["right"] = to_json(r.right);
  } else {
    j["report"] = to_json(r.right);
  }
  return j;
}

nlohmann::json to_json(const Classification& c) {
  const auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  nlohmann::json j{{"kind", std::string(to_string(c.kind))},
                   {"worst_margin", num(c.worst_margin)},
                   {"worst_t", c.worst_t},
                   {"min_dminus_margin", num(c.min_dminus_margin)},
                   {"min_dminus_t", c.min_dminus_t},
                   {"min_dplus_margin", num(c.min_dplus_margin)},
                   {"min_dplus_t", c.min_dplus_t},
                   {"points", c.points},
                   {"breakpoints", c.breakpoints}};
  return j;
}

void write_margin_csv(std::ostream& out, const std::vector<ConditionReport>& reports) {
  out << "t,side,margin1,margin2\n" << std::setprecision(17);
  for (const ConditionReport& r : reports) {
    if (r.split) {
      out << r.t << ",left," << r.left.first.margin << ',' << r.left.second.margin << '\n';
    }
    out << r.t << ',' << (r.split ? "right" : "both") << ',' << r.right.first.margin << ','
        << r.right.second.margin << '\n';
  }
}

}  // namespace handle_forge
