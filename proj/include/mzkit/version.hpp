#pragma once

namespace mzkit {

inline constexpr const char* kVersion = "mzkit 0.1.0";

}  // namespace mzkit
