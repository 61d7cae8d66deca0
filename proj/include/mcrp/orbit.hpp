#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "angles.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "time_grid.hpp"

namespace mcrp {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/**
 * Circular-orbit slot pinned to the planning time grid.
 *
 * A slot is an orbit plus a phase reference: `arg_lat_epoch` is the argument
 * of latitude at time step `ref_time`. Two slots with equal plane and
 * semi-major axis but different phase references describe the same physical
 * orbit sampled at different steps.
 */
struct OrbitalSlot {
    double semi_major_axis = 0.0; // [km], > earth radius
    double inclination = 0.0;     // [rad], in [0, pi]
    double raan = 0.0;            // right ascension of ascending node [rad], in [0, 2*pi)
    double arg_lat_epoch = 0.0;   // argument of latitude at ref_time [rad], in [0, 2*pi)
    int ref_time = 1;             // step index the phase refers to

    bool operator==(const OrbitalSlot&) const = default;
};

inline void validate_slot(const OrbitalSlot& s) {
    if (!(s.semi_major_axis > kEarthRadius))
        throw InvalidInputError("orbital slot: semi-major axis " +
                                std::to_string(s.semi_major_axis) +
                                " km must exceed the Earth radius");
    if (!(s.inclination >= 0.0 && s.inclination <= kPi))
        throw InvalidInputError("orbital slot: inclination " + std::to_string(s.inclination) +
                                " rad outside [0, pi]");
    if (!(s.raan >= 0.0 && s.raan < kTwoPi))
        throw InvalidInputError("orbital slot: raan outside [0, 2*pi)");
    if (!(s.arg_lat_epoch >= 0.0 && s.arg_lat_epoch < kTwoPi))
        throw InvalidInputError("orbital slot: arg_lat_epoch outside [0, 2*pi)");
}

// Mean motion of a circular orbit [rad/s]. Strictly decreasing in the
// semi-major axis.
inline double mean_motion(double semi_major_axis) {
    if (!(semi_major_axis > kEarthRadius))
        throw InvalidInputError("mean_motion: semi-major axis must exceed the Earth radius");
    return std::sqrt(kMu / (semi_major_axis * semi_major_axis * semi_major_axis));
}

struct PropagatedState {
    Vec3 position;  // inertial [km]
    double arg_lat; // [rad], in [0, 2*pi)
};

// Argument of latitude at step t under two-body circular motion.
inline double propagate_arg_lat(const OrbitalSlot& slot, int t, const TimeGrid& grid) {
    grid.check_step(t);
    double n = mean_motion(slot.semi_major_axis);
    return wrap_two_pi(slot.arg_lat_epoch + n * grid.seconds_between(slot.ref_time, t));
}

// Inertial position on the orbit at argument of latitude u:
// Rz(raan) * Rx(inclination) * [a cos u, a sin u, 0].
inline Vec3 orbit_position(const OrbitalSlot& slot, double arg_lat) {
    double cu = std::cos(arg_lat), su = std::sin(arg_lat);
    double ci = std::cos(slot.inclination), si = std::sin(slot.inclination);
    double co = std::cos(slot.raan), so = std::sin(slot.raan);
    double a = slot.semi_major_axis;
    return {a * (cu * co - su * ci * so),
            a * (cu * so + su * ci * co),
            a * (su * si)};
}

inline PropagatedState propagate(const OrbitalSlot& slot, int t, const TimeGrid& grid) {
    double u = propagate_arg_lat(slot, t, grid);
    return {orbit_position(slot, u), u};
}

// Same orbit re-referenced so its phase epoch sits at step t.
inline OrbitalSlot rebase_slot(const OrbitalSlot& slot, int t, const TimeGrid& grid) {
    OrbitalSlot out = slot;
    out.arg_lat_epoch = propagate_arg_lat(slot, t, grid);
    out.ref_time = t;
    return out;
}

// Evenly spread single-satellite planes: satellite k of `count` gets
// raan = 2*pi*(k-1)/count, common inclination and altitude, and all phases
// aligned at zero argument of latitude (relative phasing index 0).
inline std::vector<OrbitalSlot> walker_delta(int count, double inclination,
                                             double semi_major_axis) {
    if (count <= 0)
        throw InvalidInputError("walker_delta: satellite count must be positive");
    std::vector<OrbitalSlot> slots;
    slots.reserve(count);
    for (int k = 0; k < count; ++k) {
        OrbitalSlot s;
        s.semi_major_axis = semi_major_axis;
        s.inclination = inclination;
        s.raan = wrap_two_pi(kTwoPi * k / count);
        s.arg_lat_epoch = 0.0;
        s.ref_time = 1;
        validate_slot(s);
        slots.push_back(s);
    }
    return slots;
}

} // namespace mcrp
