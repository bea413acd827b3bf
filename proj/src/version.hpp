#pragma once

namespace emrsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace emrsim
