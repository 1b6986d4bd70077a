#pragma once

#include <cstdio>
#include <optional>
#include <string>

namespace covertkit::csv {

/// 17-significant-digit decimal rendering, the round-trip-exact precision
/// used in every CSV this toolkit writes.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Blank cell for a failed sweep point, value otherwise.
inline std::string g17(const std::optional<double>& v) {
  return v ? g17(*v) : std::string{};
}

}  // namespace covertkit::csv
