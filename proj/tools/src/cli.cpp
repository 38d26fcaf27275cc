#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "handle_forge/constructors.hpp"
#include "handle_forge/error.hpp"
#include "handle_forge/levi.hpp"
#include "handle_forge/profile_io.hpp"
#include "handle_forge/pseudoconvexity.hpp"

namespace handle_forge::cli {

namespace {

struct CommonBuild {
  std::string out_dir = ".";
  std::size_t grid = 2000;
  std::optional<double> radius;
  std::size_t samples = 100000;
  std::uint64_t seed = 42;
};

struct RotationalArgs {
  double lambda = 0.0;
  double a = 1.0;
  double eps = 0.0;
  bool relax = false;
  std::optional<double> eta;
};

struct QuadraticArgs {
  std::string A, B;
  double r = 0.0;
  double eps = 0.0;
};

struct VerifyArgs {
  std::string profile;
  std::string condition;
  std::size_t grid = 1000;
  std::string which;
  std::optional<double> lo, hi;
  std::optional<int> levi_n;
  std::size_t radii = 50;
  std::size_t points = 20;
  std::uint64_t seed = 42;
  std::string report;
  std::string csv;
};

struct ExportArgs {
  std::string profile;
  std::string what;
  std::string out;
  std::string which;
  double level = 0.0;
  std::size_t points = 2000;
  std::optional<double> lo, hi;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool include_lo = true;
  bool include_hi = true;
};

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotStronglyPsh:
    case ErrorCode::WrongRegime:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ShapeError:
    case ErrorCode::FormatError:
    case ErrorCode::DomainEmpty:
    case ErrorCode::OutOfDomain:
    case ErrorCode::NotPositive:
      return kUsageError;
    default:
      return kVerificationFailure;
  }
}

std::optional<SmoothingOptions> smoothing_from(const CommonBuild& c) {
  if (!c.radius) return std::nullopt;
  SmoothingOptions s;
  s.relative_radius = *c.radius;
  return s;
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) fail(ErrorCode::FormatError, "cannot create " + dir + ": " + ec.message());
  return p;
}

nlohmann::json containment_json(const ContainmentReport& r, std::uint64_t seed) {
  return {{"samples", r.samples},
          {"seed", seed},
          {"lower_violations", r.lower_violations},
          {"upper_violations", r.upper_violations},
          {"passed", r.passed()}};
}

int write_outputs(const CommonBuild& c, const nlohmann::json& handle, nlohmann::json cert,
                  bool passed, std::ostream& out) {
  const auto dir = prepare_dir(c.out_dir);
  cert["passed"] = passed;
  write_json_file((dir / "handle.json").string(), handle);
  write_json_file((dir / "certify.json").string(), cert);
  nlohmann::json summary{{"kind", handle.at("kind")},
                         {"constants", handle.value("constants", nlohmann::json::object())},
                         {"passed", passed},
                         {"handle", (dir / "handle.json").string()},
                         {"certificate", (dir / "certify.json").string()}};
  out << summary.dump(2) << '\n';
  return passed ? kSuccess : kVerificationFailure;
}

int construct_rotational(bool outer, const RotationalArgs& a, const CommonBuild& c,
                         std::ostream& out) {
  HandleOptions o;
  o.relax = a.relax;
  o.eta = a.eta;
  o.grid = c.grid;
  o.smoothing = smoothing_from(c);
  o.require_certified = false;
  const HandleConstruction h =
      outer ? build_outer_handle(a.lambda, a.a, a.eps, o) : build_inner_handle(a.lambda, a.eps, o);
  nlohmann::json cert = certificate_json(h);
  bool passed = h.certified();
  if (c.samples > 0) {
    const ContainmentReport rep = check_containment(h, c.samples, c.seed);
    cert["containment"] = containment_json(rep, c.seed);
    passed = passed && rep.passed();
  }
  return write_outputs(c, to_json(h), std::move(cert), passed, out);
}

int construct_quadratic(const QuadraticArgs& a, const CommonBuild& c, std::ostream& out) {
  const QuadraticHandle q =
      build_quadratic_handle(parse_matrix(a.A), parse_matrix(a.B), a.r, a.eps, smoothing_from(c), c.grid);
  nlohmann::json cert = certificate_json(q);
  bool passed = q.cap_certificate.passed;
  if (c.samples > 0) {
    const ContainmentReport rep = check_containment(q, c.samples, c.seed);
    cert["containment"] = containment_json(rep, c.seed);
    passed = passed && rep.passed();
  }
  return write_outputs(c, to_json(q), std::move(cert), passed, out);
}

int construct_model(const RotationalArgs& a, const CommonBuild& c, std::ostream& out) {
  const RadialProfile g = sqrt_quadratic(a.lambda, a.a);
  nlohmann::json handle{{"kind", "model"},
                        {"constants", {{"lambda", a.lambda}, {"a", a.a}}},
                        {"f", profile_to_json(g)}};
  const double lo = g.domain_lo();
  const double hi = std::isfinite(g.domain_hi()) ? g.domain_hi() : lo + 10.0;
  GridOptions grid;
  grid.n_grid = c.grid;
  grid.include_lo = lo > 0.0 ? false : true;
  grid.include_hi = std::isfinite(g.domain_hi()) ? false : true;
  const Classification cls = classify(g, Condition::FForm, lo, hi, grid);
  nlohmann::json cert{{"kind", "model"}, {"condition", "6"}, {"classification", to_json(cls)}};
  const bool strict = cls.kind == ClassKind::DMinusStrong || cls.kind == ClassKind::DPlusStrong;
  return write_outputs(c, handle, std::move(cert), strict, out);
}

// --- verify / export helpers -------------------------------------------------

std::string default_which(const std::string& kind, const std::string& condition) {
  if (kind == "quadratic") return "cap_smoothed";
  if (kind == "outer" || kind == "inner") return condition == "8" ? "smoothed" : "f";
  return "f";
}

Range default_range(const Document& d, const std::string& which) {
  Range r;
  const RadialProfile& p = d.profile(which);
  if (d.kind == "outer") {
    const double sigma = d.constant("sigma"), eps = d.constant("eps");
    const double lambda = d.constant("lambda"), a = d.constant("a");
    if (which == "f" || which == "fprime") return {sigma, eps, false, false};
    return {0.0, 2.0 * std::sqrt(4.0 * lambda * eps * eps + a), false, true};
  }
  if (d.kind == "inner") {
    const double sigma = d.constant("sigma"), eps = d.constant("eps");
    const double lambda = d.constant("lambda");
    const double zero = lambda < 0.0 ? 1.0 / std::sqrt(-lambda) : kInf;
    if (which == "inverse") {
      const double flat = p.segments().back().lo;
      return {p.domain_lo(), 2.0 * flat - p.domain_lo(), false, true};
    }
    return {sigma, std::min(2.0 * eps, 0.5 * (eps + zero)), false, true};
  }
  if (d.kind == "quadratic") return {0.0, 2.0 * d.constant("R"), true, true};
  r.lo = p.domain_lo();
  r.include_lo = true;
  if (std::isfinite(p.domain_hi())) {
    r.hi = p.domain_hi();
    r.include_hi = false;
  } else {
    r.hi = r.lo + 10.0;
  }
  return r;
}

struct LeviTally {
  std::size_t radii = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t mismatches = 0;
  double min_positive = kInf;
  double max_negative = -kInf;
};

LeviTally levi_oracle(const RadialProfile& f, const Range& r, int n, std::size_t radii,
                      std::size_t points, std::uint64_t seed) {
  const RadialProfile theta = theta_of_f(restricted(f, r.lo, r.hi));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto direction = [&]() {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return Eigen::VectorXd(v / v.norm());
  };
  const auto breaks = f.breakpoints();
  LeviTally t;
  for (std::size_t i = 0; i < radii; ++i) {
    const double rad = r.lo + (r.hi - r.lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(radii);
    bool near_break = false;
    for (const double b : breaks) near_break = near_break || std::abs(rad - b) <= 1e-9 * std::max(1.0, b);
    const ConditionReport cr = theta_condition(theta, rad * rad);
    ++t.radii;
    if (near_break || cr.split ||
        (cr.verdict != Verdict::StrictHolds && cr.verdict != Verdict::ReverseHolds)) {
      t.skipped += points;
      continue;
    }
    const double fv = f.value(rad);
    for (std::size_t j = 0; j < points; ++j) {
      const BoundaryPoint p{direction() * rad, direction() * fv};
      const Eigen::VectorXd spec = rotational_levi_spectrum(theta, p);
      ++t.checked;
      if (cr.verdict == Verdict::StrictHolds) {
        t.min_positive = std::min(t.min_positive, spec.minCoeff());
        if (!(spec.minCoeff() > 0.0)) ++t.mismatches;
      } else {
        t.max_negative = std::max(t.max_negative, spec.maxCoeff());
        if (!(spec.maxCoeff() < 0.0)) ++t.mismatches;
      }
    }
  }
  return t;
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const Document doc = load_document(a.profile);
  const std::string which = a.which.empty() ? default_which(doc.kind, a.condition) : a.which;
  const RadialProfile& p = doc.profile(which);
  Range r = default_range(doc, which);
  if (a.lo) r.lo = *a.lo;
  if (a.hi) r.hi = *a.hi;
  if (!(r.lo < r.hi)) fail(ErrorCode::InvalidArgument, "empty verification range");

  GridOptions g;
  g.n_grid = a.grid;
  g.include_lo = r.include_lo;
  g.include_hi = r.include_hi;
  g.keep_reports = !a.csv.empty();

  Condition cond = Condition::FForm;
  std::optional<ClassKind> expected;
  RadialProfile target = p;
  double lo = r.lo, hi = r.hi;
  if (a.condition == "2") {
    cond = Condition::Theta;
    target = theta_of_f(p);
    lo *= lo;
    hi *= hi;
  } else if (a.condition == "8") {
    expected = ClassKind::DMinusStrong;
  } else if (a.condition == "9") {
    expected = ClassKind::DPlusStrong;
  } else if (a.condition == "cap") {
    cond = Condition::Cap;
    expected = ClassKind::DMinusStrong;
    if (!doc.constants.contains("lambda1")) {
      fail(ErrorCode::InvalidArgument, "condition cap needs a quadratic handle document");
    }
    g.cap_bound = doc.constant("lambda1");
  }

  const Classification cls = classify(target, cond, lo, hi, g);
  bool passed = cls.worst_margin > 0.0 &&
                (expected ? cls.kind == *expected
                          : (cls.kind == ClassKind::DMinusStrong || cls.kind == ClassKind::DPlusStrong));
  nlohmann::json report{{"profile", a.profile},
                        {"which", which},
                        {"condition", a.condition},
                        {"range", {lo, hi}},
                        {"grid", a.grid},
                        {"classification", to_json(cls)}};
  if (expected) report["expected"] = std::string(to_string(*expected));

  if (a.levi_n) {
    if (cond == Condition::Cap) fail(ErrorCode::InvalidArgument, "the Levi oracle applies to rotational profiles");
    const LeviTally t = levi_oracle(p, r, *a.levi_n, a.radii, a.points, a.seed);
    report["levi_oracle"] = {{"n", *a.levi_n},
                             {"seed", a.seed},
                             {"radii", t.radii},
                             {"checked", t.checked},
                             {"skipped", t.skipped},
                             {"mismatches", t.mismatches},
                             {"min_positive_eigenvalue", finite_or_null(t.min_positive)},
                             {"max_negative_eigenvalue", finite_or_null(t.max_negative)}};
    passed = passed && t.mismatches == 0;
  }
  report["passed"] = passed;

  if (!a.csv.empty()) {
    std::ofstream csv(a.csv);
    if (!csv) fail(ErrorCode::FormatError, "cannot write " + a.csv);
    write_margin_csv(csv, cls.reports);
  }
  if (!a.report.empty()) write_json_file(a.report, report);
  out << report.dump(2) << '\n';
  return passed ? kSuccess : kVerificationFailure;
}

std::vector<double> sample_points(const RadialProfile& p, const Range& r, std::size_t n) {
  GridOptions g;
  g.n_grid = n;
  g.include_lo = r.include_lo;
  g.include_hi = r.include_hi;
  return certification_grid(p, r.lo, r.hi, g);
}

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const Document doc = load_document(a.profile);
  std::string which = a.which;
  if (which.empty()) {
    if (doc.kind == "quadratic") which = "cap_smoothed";
    else if (doc.kind == "outer" && a.what == "region") which = "smoothed";
    else if (doc.kind == "inner" && a.what == "region") which = "smoothed";
    else which = "f";
  }
  const RadialProfile& p = doc.profile(which);
  Range r = default_range(doc, which);
  if (a.lo) r.lo = *a.lo;
  if (a.hi) r.hi = *a.hi;

  std::ofstream csv(a.out);
  if (!csv) fail(ErrorCode::FormatError, "cannot write " + a.out);
  csv << std::setprecision(17);
  std::size_t rows = 0;
  if (a.what == "profile") {
    const auto ts = sample_points(p, r, a.points);
    write_profile_csv(csv, p, ts);
    rows = ts.size();
  } else if (a.what == "fprime") {
    csv << "t,fprime\n";
    for (const double t : sample_points(p, r, a.points)) {
      csv << t << ',' << p.jet(t).d1 << '\n';
      ++rows;
    }
  } else {
    csv << "abs_x,abs_y\n";
    auto row = [&](double x, double y) {
      csv << x << ',' << y << '\n';
      ++rows;
    };
    if (doc.kind == "quadratic") {
      // Boundary of {tau <= c} in (|x|, sqrt(Q)): Q = h(|x|^2) + c.
      for (const double t : sample_points(p, {0.0, 2.0 * doc.constant("R"), true, true}, a.points)) {
        const double q = p.value(t) + a.level;
        if (q >= 0.0) row(std::sqrt(t), std::sqrt(q));
      }
    } else if (doc.kind == "outer" && which != "f") {
      // K = {|x| <= h(|y|)}: the boundary is (h(u), u).
      for (const double u : sample_points(p, r, a.points)) row(p.value(u), u);
    } else if (doc.kind == "inner") {
      const double sigma = doc.constant("sigma");
      const double top = p.value(sigma);
      for (int i = 8; i > 0; --i) row(sigma, top * (1.0 + i / 8.0));
      for (const double t : sample_points(p, {sigma, r.hi, true, true}, a.points)) row(t, p.value(t));
    } else {
      for (const double t : sample_points(p, r, a.points)) row(t, p.value(t));
    }
  }
  out << nlohmann::json{{"out", a.out}, {"what", a.what}, {"which", which}, {"rows", rows}}.dump()
      << '\n';
  return kSuccess;
}

void add_build_options(CLI::App* sub, CommonBuild& c) {
  sub->add_option("--out-dir", c.out_dir, "Directory for handle.json and certify.json");
  sub->add_option("--grid", c.grid, "Certification grid size")->check(CLI::PositiveNumber);
  sub->add_option("--radius", c.radius, "Relative smoothing radius")->check(CLI::PositiveNumber);
  sub->add_option("--samples", c.samples, "Containment samples (0 skips the check)");
  sub->add_option("--seed", c.seed, "Seed for containment sampling");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Construct and certify strongly pseudoconvex handles"};
  app.name("handle_forge");
  app.require_subcommand(1);

  CommonBuild common;
  RotationalArgs rot;
  QuadraticArgs quad;
  VerifyArgs ver;
  ExportArgs exp;

  CLI::App* construct = app.add_subcommand("construct", "Build a handle and write handle.json / certify.json");
  construct->require_subcommand(1);

  CLI::App* outer = construct->add_subcommand("outer", "Handle K around {|y| > g(|x|)}, lambda > 1");
  outer->add_option("--lambda", rot.lambda)->required();
  outer->add_option("--a", rot.a)->check(CLI::PositiveNumber);
  outer->add_option("--eps", rot.eps)->required();
  outer->add_flag("--relax", rot.relax, "Enlarge eta while certification passes");
  outer->add_option("--eta", rot.eta);
  add_build_options(outer, common);

  CLI::App* inner = construct->add_subcommand("inner", "Handle L around {|y| < g(|x|)}, lambda < 1");
  inner->add_option("--lambda", rot.lambda)->required();
  inner->add_option("--eps", rot.eps)->required();
  inner->add_flag("--relax", rot.relax);
  inner->add_option("--eta", rot.eta);
  add_build_options(inner, common);

  CLI::App* quadratic = construct->add_subcommand("quadratic", "Quadratic model handle K_c");
  quadratic->add_option("--A", quad.A, "diag:a,b,... or matrix file")->required();
  quadratic->add_option("--B", quad.B, "diag:a,b,... or matrix file")->required();
  quadratic->add_option("--r", quad.r)->required();
  quadratic->add_option("--eps", quad.eps)->required();
  add_build_options(quadratic, common);

  CLI::App* model = construct->add_subcommand("model", "Profile g(t) = sqrt(lambda t^2 + a)");
  model->add_option("--lambda", rot.lambda)->required();
  model->add_option("--a", rot.a);
  add_build_options(model, common);

  CLI::App* verify = app.add_subcommand("verify", "Grid certification of one condition");
  verify->add_option("--profile", ver.profile)->required();
  verify->add_option("--condition", ver.condition)
      ->required()
      ->check(CLI::IsMember({"2", "6", "8", "9", "cap"}));
  verify->add_option("--grid", ver.grid)->check(CLI::PositiveNumber);
  verify->add_option("--which", ver.which, "Profile inside a construction (f, inverse, smoothed, cap, ...)");
  verify->add_option("--lo", ver.lo);
  verify->add_option("--hi", ver.hi);
  verify->add_option("--levi-oracle", ver.levi_n, "Cross-check Levi spectra in C^n")
      ->check(CLI::IsMember({2, 4}));
  verify->add_option("--radii", ver.radii);
  verify->add_option("--points", ver.points);
  verify->add_option("--seed", ver.seed);
  verify->add_option("--report", ver.report, "Also write the report to this file");
  verify->add_option("--csv", ver.csv, "Per-point margins");

  CLI::App* exporter = app.add_subcommand("export", "CSV data for plotting");
  exporter->add_option("--profile", exp.profile)->required();
  exporter->add_option("--what", exp.what)->required()->check(CLI::IsMember({"profile", "fprime", "region"}));
  exporter->add_option("--out", exp.out)->required();
  exporter->add_option("--which", exp.which);
  exporter->add_option("--level", exp.level, "Level c of K_c for quadratic regions");
  exporter->add_option("--points", exp.points)->check(CLI::PositiveNumber);
  exporter->add_option("--lo", exp.lo);
  exporter->add_option("--hi", exp.hi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  try {
    if (outer->parsed()) return construct_rotational(true, rot, common, out);
    if (inner->parsed()) return construct_rotational(false, rot, common, out);
    if (quadratic->parsed()) return construct_quadratic(quad, common, out);
    if (model->parsed()) return construct_model(rot, common, out);
    if (verify->parsed()) return cmd_verify(ver, out);
    if (exporter->parsed()) return cmd_export(exp, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kUsageError;
}

}  // namespace handle_forge::cli
