#pragma once

#include <cstdio>
#include <string>

namespace mosm {

/// Shortest-safe round-trip text for a double (17 significant digits).
inline std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace mosm
