#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "handle_forge/profile.hpp"

namespace handle_forge::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2 };

/// A handle.json written by `construct`, or a bare profile JSON.
struct Document {
  /// "outer", "inner", "quadratic", "model" or "profile".
  std::string kind;
  nlohmann::json constants = nlohmann::json::object();
  std::map<std::string, RadialProfile> profiles;

  const RadialProfile& profile(const std::string& which) const;
  double constant(const std::string& name) const { return constants.at(name).get<double>(); }
};

Document load_document(const std::string& path);

/// Parses a matrix given as `diag:a,b,...` or as the path of a whitespace
/// separated file (one row per line).
Eigen::MatrixXd parse_matrix(const std::string& spec);

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace handle_forge::cli
