#pragma once

#include <cstdio>
#include <string>

namespace qfl::detail {

// Shortest round-trip decimal; used for every CSV/JSON number we emit by hand
// so reruns are byte-identical.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace qfl::detail
