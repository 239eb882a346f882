#pragma once

namespace splash2d {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace splash2d
