#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "handle_forge/profile.hpp"

namespace handle_forge {

nlohmann::json segment_to_json(const Segment& s);
Segment segment_from_json(const nlohmann::json& j);

/// {"domain": [lo, hi|null], "continuity": ..., "segments": [...]}.
nlohmann::json profile_to_json(const RadialProfile& p);
/// Throws FormatError on malformed input, InvalidArgument on a bad partition.
RadialProfile profile_from_json(const nlohmann::json& j);

/// CSV rows t,f,f',f''(left),f''(right) at the given abscissae.
void write_profile_csv(std::ostream& out, const RadialProfile& p, std::span<const double> ts);

/// Reads a JSON document from disk. Throws FormatError.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace handle_forge
