#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "handle_forge/constructors.hpp"
#include "handle_forge/error.hpp"

namespace handle_forge::detail {

inline Segment segment(SegmentKind kind, double lo, double hi, std::vector<double> coeffs) {
  Segment s;
  s.kind = kind;
  s.lo = lo;
  s.hi = hi;
  s.coeffs = std::move(coeffs);
  return s;
}

/// Copy of a forward segment restricted to [lo, hi].
inline Segment restricted(Segment s, double lo, double hi) {
  s.lo = lo;
  s.hi = hi;
  return s;
}

inline GridOptions open_grid(std::size_t n, bool include_lo, bool include_hi) {
  GridOptions g;
  g.n_grid = n;
  g.include_lo = include_lo;
  g.include_hi = include_hi;
  return g;
}

inline std::string describe_failure(const std::string& what, const Certification& c) {
  std::ostringstream os;
  os << what << " is " << to_string(c.classification.kind) << " (expected "
     << to_string(c.expected) << "), worst margin " << c.classification.worst_margin
     << " at t = " << c.classification.worst_t;
  return os.str();
}

}  // namespace handle_forge::detail
