#pragma once

#include <numbers>

namespace stirap {

// All internal frequencies are angular (rad/us); user-facing values are
// quoted as f = omega/2pi in MHz. With time in us, 1 MHz of f corresponds
// to 2pi rad/us, so the two helpers below are the only conversion needed.
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double mhz_to_rad_per_us(double f_mhz) { return two_pi * f_mhz; }
constexpr double rad_per_us_to_mhz(double omega) { return omega / two_pi; }

}  // namespace stirap
