#include <cmath>
#include <string>

#include "handle_forge/constructors.hpp"
#include "handle_forge/profile_io.hpp"

namespace handle_forge {

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

nlohmann::json certification_json(const Certification& c) {
  return {{"passed", c.passed},
          {"expected", std::string(to_string(c.expected))},
          {"classification", to_json(c.classification)}};
}

nlohmann::json smoothing_json(const SmoothedCertification& s) {
  return {{"passed", s.passed},
          {"before", certification_json(s.before)},
          {"after", certification_json(s.after)},
          {"margin_loss", number(s.margin_loss)},
          {"halvings", s.halvings},
          {"smoothed_breakpoints", s.smoothing.smoothed},
          {"radii", s.smoothing.radii},
          {"skipped_breakpoints", s.smoothing.skipped},
          {"max_value_shift", s.smoothing.max_value_shift}};
}

const char* kind_name(HandleKind k) { return k == HandleKind::Outer ? "outer" : "inner"; }

}  // namespace

nlohmann::json to_json(const HandleConstruction& h) {
  nlohmann::json constants{{"lambda", h.lambda}, {"a", h.a},       {"eps", h.eps},
                           {"c", h.c},           {"eta", h.eta},   {"c1", h.c1},
                           {"log_sigma", h.log_sigma},             {"sigma", h.sigma},
                           {"junction_slope", h.junction_slope}};
  if (h.kind == HandleKind::Inner) {
    constants["k"] = h.k;
    constants["branch_end"] = h.branch_end;
  }
  return {{"kind", kind_name(h.kind)},
          {"constants", std::move(constants)},
          {"relax_steps", h.relax_steps},
          {"collapsed", h.collapsed},
          {"fprime", profile_to_json(h.fprime)},
          {"f", profile_to_json(h.f)},
          {"inverse", profile_to_json(h.inverse)},
          {"smoothed", profile_to_json(h.smoothed)},
          {"smoothed_role", h.kind == HandleKind::Outer ? "inverse" : "f"}};
}

nlohmann::json to_json(const QuadraticHandle& q) {
  return {{"kind", "quadratic"},
          {"A", matrix_json(q.A)},
          {"B", matrix_json(q.B)},
          {"constants",
           {{"r", q.r},
            {"eps", q.eps},
            {"lambda1", q.lambda1},
            {"t0", q.t0},
            {"delta", q.delta},
            {"mu", q.mu},
            {"R", q.R},
            {"hR", q.hR},
            {"c0", q.c0},
            {"c0_smoothed", q.c0_smoothed}}},
          {"cap", profile_to_json(q.cap)},
          {"cap_smoothed", profile_to_json(q.cap_smoothed)}};
}

nlohmann::json certificate_json(const HandleConstruction& h) {
  return {{"kind", kind_name(h.kind)},
          {"certified", h.certified()},
          {"f", certification_json(h.f_certificate)},
          {"inverse", certification_json(h.inverse_certificate)},
          {"smoothing", smoothing_json(h.smoothing_certificate)}};
}

nlohmann::json certificate_json(const QuadraticHandle& q) {
  return {{"kind", "quadratic"},
          {"certified", q.cap_certificate.passed},
          {"cap_bound", q.lambda1},
          {"cap", smoothing_json(q.cap_certificate)}};
}

}  // namespace handle_forge
