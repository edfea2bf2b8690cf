#pragma once

namespace stirap {

inline constexpr const char* version = "1.0.0";

}  // namespace stirap
