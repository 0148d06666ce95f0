#pragma once

namespace qpurity {

inline constexpr const char* kToolName = "qpurity";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace qpurity
