#pragma once

#include <cmath>
#include <numbers>

namespace mcrp {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

// Wrap an angle into [0, 2*pi).
inline double wrap_two_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w;
}

// Wrap an angle into (-pi, pi].
inline double wrap_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    else if (w > kPi) w -= kTwoPi;
    return w;
}

} // namespace mcrp
