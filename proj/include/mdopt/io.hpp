#pragma once

#include <cstdio>
#include <span>
#include <string>

namespace mdopt {

// Round-trippable decimal form, stable across runs and thread counts.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string join_coords(std::span<const double> v, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace mdopt
