#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace qpurity {

// Canonical 12-significant-digit formatting used for labels and reports.
inline std::string fmt12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace qpurity
