#pragma once

#include <cstdio>
#include <string>

namespace renyi {

/// Shortest-safe decimal form with 17 significant digits; parses back to the
/// same double.
inline std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace renyi
