#pragma once

#include <cmath>
#include <numbers>

namespace ghzclock {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps any angle onto [-pi, pi); +pi goes to -pi.
inline double wrap_phase(double x) {
    double r = std::fmod(x + kPi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    double w = r - kPi;
    return w >= kPi ? -kPi : w;
}

}  // namespace ghzclock
