#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "handle_forge/error.hpp"
#include "handle_forge/profile_io.hpp"

namespace handle_forge::cli {

const RadialProfile& Document::profile(const std::string& which) const {
  const auto it = profiles.find(which);
  if (it == profiles.end()) {
    std::string names;
    for (const auto& [name, p] : profiles) names += (names.empty() ? "" : ", ") + name;
    fail(ErrorCode::InvalidArgument, kind + " document has no profile '" + which + "' (have " + names + ")");
  }
  return it->second;
}

Document load_document(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  Document d;
  try {
    if (!j.contains("kind")) {
      d.kind = "profile";
      d.profiles.emplace("f", profile_from_json(j));
      return d;
    }
    d.kind = j.at("kind").get<std::string>();
    d.constants = j.value("constants", nlohmann::json::object());
    std::vector<std::string> names;
    if (d.kind == "outer" || d.kind == "inner") {
      names = {"f", "fprime", "inverse", "smoothed"};
    } else if (d.kind == "quadratic") {
      names = {"cap", "cap_smoothed"};
    } else if (d.kind == "model") {
      names = {"f"};
    } else {
      fail(ErrorCode::FormatError, path + ": unknown document kind '" + d.kind + "'");
    }
    for (const std::string& n : names) d.profiles.emplace(n, profile_from_json(j.at(n)));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, path + ": " + e.what());
  }
  return d;
}

Eigen::MatrixXd parse_matrix(const std::string& spec) {
  std::vector<std::vector<double>> rows;
  auto parse_number = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) fail(ErrorCode::FormatError, "bad matrix entry '" + tok + "'");
    return v;
  };

  if (spec.rfind("diag:", 0) == 0) {
    std::stringstream ss(spec.substr(5));
    std::string tok;
    std::vector<double> diag;
    while (std::getline(ss, tok, ',')) diag.push_back(parse_number(tok));
    if (diag.empty()) fail(ErrorCode::FormatError, "empty diagonal in '" + spec + "'");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
  }

  std::ifstream in(spec);
  if (!in) fail(ErrorCode::FormatError, "cannot open matrix file " + spec);
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> row;
    while (ss >> tok) row.push_back(parse_number(tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::FormatError, spec + ": empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) fail(ErrorCode::ShapeError, spec + ": ragged rows");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

}  // namespace handle_forge::cli
