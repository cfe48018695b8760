#pragma once

namespace oamzi {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace oamzi
