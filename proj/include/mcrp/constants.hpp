#pragma once

namespace mcrp {

// Physical constants in km / s / rad units. Every module in the library
// works in these units internally; degrees appear only at file boundaries.
struct Constants {
    double mu = 398600.4418;                   // Earth gravitational parameter [km^3/s^2]
    double earth_radius = 6378.137;            // Earth equatorial radius [km]
    double earth_rotation_rate = 7.2921159e-5; // sidereal rotation rate [rad/s]

    constexpr bool valid() const {
        return mu > 0.0 && earth_radius > 0.0 && earth_rotation_rate > 0.0;
    }
};

inline constexpr Constants kConstants{};
inline constexpr double kMu = kConstants.mu;
inline constexpr double kEarthRadius = kConstants.earth_radius;
inline constexpr double kEarthRotationRate = kConstants.earth_rotation_rate;

} // namespace mcrp
