#include "handle_forge/profile_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "handle_forge/error.hpp"

namespace handle_forge {

namespace {

nlohmann::json bound_to_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double bound_from_json(const nlohmann::json& j) {
  if (j.is_null()) return kInf;
  if (!j.is_number()) fail(ErrorCode::FormatError, "interval bounds must be numbers or null");
  return j.get<double>();
}

}  // namespace

nlohmann::json segment_to_json(const Segment& s) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(s.kind));
  j["interval"] = nlohmann::json::array({bound_to_json(s.lo), bound_to_json(s.hi)});
  j["coeffs"] = s.coeffs;
  if (s.shift != 0.0) j["shift"] = s.shift;
  if (!s.parts.empty()) {
    auto parts = nlohmann::json::array();
    for (const Segment& p : s.parts) parts.push_back(segment_to_json(p));
    j["parts"] = std::move(parts);
  }
  return j;
}

Segment segment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::FormatError, "segment must be an object");
  try {
    Segment s;
    s.kind = segment_kind_from_string(j.at("kind").get<std::string>());
    const auto& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2) fail(ErrorCode::FormatError, "interval must be [lo, hi]");
    s.lo = iv[0].is_null() ? -kInf : iv[0].get<double>();
    s.hi = bound_from_json(iv[1]);
    if (j.contains("coeffs")) s.coeffs = j.at("coeffs").get<std::vector<double>>();
    s.shift = j.value("shift", 0.0);
    if (j.contains("parts")) {
      for (const auto& p : j.at("parts")) s.parts.push_back(segment_from_json(p));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, std::string("bad segment: ") + e.what());
  }
}

nlohmann::json profile_to_json(const RadialProfile& p) {
  nlohmann::json j;
  j["domain"] = nlohmann::json::array({bound_to_json(p.domain_lo()), bound_to_json(p.domain_hi())});
  j["continuity"] = std::string(to_string(p.continuity()));
  auto segs = nlohmann::json::array();
  for (const Segment& s : p.segments()) segs.push_back(segment_to_json(s));
  j["segments"] = std::move(segs);
  return j;
}

RadialProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("segments")) {
    fail(ErrorCode::FormatError, "profile needs a 'segments' array");
  }
  std::vector<Segment> segs;
  for (const auto& s : j.at("segments")) segs.push_back(segment_from_json(s));
  Continuity c = Continuity::C0;
  try {
    c = continuity_from_string(j.value("continuity", std::string("C0")));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, e.what());
  }
  RadialProfile p(std::move(segs), c);
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    if (!d.is_array() || d.size() != 2 || d[0].get<double>() != p.domain_lo() ||
        bound_from_json(d[1]) != p.domain_hi()) {
      fail(ErrorCode::FormatError, "domain does not match the segment intervals");
    }
  }
  return p;
}

void write_profile_csv(std::ostream& out, const RadialProfile& p, std::span<const double> ts) {
  out << "t,f,fprime,fsecond_left,fsecond_right\n";
  out << std::setprecision(17);
  for (double t : ts) {
    const Jet r = p.jet(t, Side::Right);
    const Jet l = p.jet(t, Side::Left);
    out << t << ',' << r.value << ',' << r.d1 << ',' << l.d2 << ',' << r.d2 << '\n';
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FormatError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::FormatError, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace handle_forge
