#pragma once

namespace polarfit {

inline constexpr const char* kVersion = "0.1.0";

} // namespace polarfit
