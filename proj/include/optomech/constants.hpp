#pragma once

#include <numbers>

namespace optomech {

// CODATA 2018 exact / recommended values, SI units.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;  // J s
    static constexpr double k_B = 1.380649e-23;      // J / K
    static constexpr double c = 299792458.0;         // m / s
};

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace optomech
