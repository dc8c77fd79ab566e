#pragma once

#include <cstdio>
#include <string>

namespace amkl {

/// Formats a double with 17 significant digits, enough to reproduce the exact
/// bit pattern on re-parse. Used everywhere a file must be byte-stable.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace amkl
