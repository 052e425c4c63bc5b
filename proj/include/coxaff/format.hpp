#pragma once

#include <cstdio>
#include <string>

namespace coxaff {

// Round-trip decimal form of a double.
inline std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace coxaff
