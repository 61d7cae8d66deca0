#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "angles.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "orbit.hpp"

namespace mcrp {

// Minimum-cost two-burn rendezvous with a phase offset in the same circular
// orbit. The chaser flies k_transfer revolutions of a temporary orbit whose
// period is tuned so the target arrives at the re-entry point after k_target
// of its own revolutions.
struct PhasingSolution {
    double delta_v = 0.0; // km/s, both burns combined
    int k_target = 0;     // target revolutions during the transfer
    int k_transfer = 0;   // chaser revolutions on the phasing orbit
    double a_phase = 0.0; // km, semi-major axis of the phasing orbit
    double duration = 0.0; // s

    bool operator==(const PhasingSolution&) const = default;
};

/**
 * Cheapest phasing solution for a phase offset delta_u (rad, |delta_u| < 2pi)
 * in a circular orbit of semi-major axis a. Candidates enumerate both
 * directions around the orbit and revolution counts 1..max_revolutions for
 * target and chaser independently; a candidate is kept when its transfer time
 * is positive and the phasing orbit's perigee clears the surface. Positive
 * delta_u waits for the target, so it selects a raised (slower) orbit.
 */
inline PhasingSolution phasing_cost(double a, double delta_u, int max_revolutions = 5) {
    if (!(a > kEarthRadius))
        throw InvalidInputError("phasing: semi-major axis must exceed the Earth radius");
    if (!(std::abs(delta_u) < kTwoPi))
        throw InvalidInputError("phasing: phase offset must lie in (-2pi, 2pi)");

    double du = wrap_pi(delta_u);
    double n = mean_motion(a);
    if (du == 0.0) {
        // Stay where you are; report one coasted revolution for bookkeeping.
        return {0.0, 1, 1, a, kTwoPi / n};
    }
    if (max_revolutions < 1)
        throw InfeasibleTransferError("phasing: no revolutions allowed for a nonzero offset");

    double reps[2] = {du, du - std::copysign(kTwoPi, du)};
    double v_circ = std::sqrt(kMu / a);

    PhasingSolution best;
    bool found = false;
    for (double rep : reps) {
        for (int kt = 1; kt <= max_revolutions; ++kt) {
            double t_phase = (kTwoPi * kt + rep) / n;
            if (t_phase <= 0.0) continue;
            for (int kk = 1; kk <= max_revolutions; ++kk) {
                double ratio = t_phase / (kTwoPi * kk);
                double a_ph = std::cbrt(kMu * ratio * ratio);
                if (std::min(a, 2.0 * a_ph - a) <= kEarthRadius) continue;
                double dv = 2.0 * std::abs(std::sqrt(kMu * (2.0 / a - 1.0 / a_ph)) - v_circ);
                if (!found || dv < best.delta_v) {
                    best = {dv, kt, kk, a_ph, t_phase};
                    found = true;
                }
            }
        }
    }
    if (!found) throw InfeasibleTransferError("phasing: every candidate orbit dips below the surface");
    return best;
}

// Single-burn combined inclination and node change on a circular orbit:
// rotate the velocity vector by the angle between the two orbit planes.
inline double plane_change_cost(double a, double i1, double i2, double delta_raan) {
    if (!(a > kEarthRadius))
        throw InvalidInputError("plane change: semi-major axis must exceed the Earth radius");
    if (!(i1 >= 0.0 && i1 <= kPi && i2 >= 0.0 && i2 <= kPi))
        throw InvalidInputError("plane change: inclination outside [0, pi]");
    if (i1 == i2 && wrap_pi(delta_raan) == 0.0) return 0.0;
    double cos_theta =
        std::cos(i1) * std::cos(i2) + std::sin(i1) * std::sin(i2) * std::cos(delta_raan);
    double theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
    return 2.0 * std::sqrt(kMu / a) * std::sin(theta / 2.0);
}

// Price a slot-to-slot transfer: plane change at the current speed, then
// phasing in the target plane. Only same-altitude transfers are supported,
// and both slots must quote their phase at the same reference step.
inline double transfer_cost(const OrbitalSlot& from, const OrbitalSlot& to,
                            int max_revolutions = 5) {
    if (from.semi_major_axis != to.semi_major_axis)
        throw UnsupportedTransferError("transfer: slots differ in semi-major axis");
    if (from.ref_time != to.ref_time)
        throw InvalidInputError("transfer: slots quote phase at different reference steps");
    double plane = plane_change_cost(from.semi_major_axis, from.inclination, to.inclination,
                                     to.raan - from.raan);
    double du = wrap_pi(to.arg_lat_epoch - from.arg_lat_epoch);
    return plane + phasing_cost(from.semi_major_axis, du, max_revolutions).delta_v;
}

// Widest inclination offset reachable with budget c_max, derated by eta.
inline double inclination_bound(double a, double c_max, double eta) {
    if (!(a > kEarthRadius))
        throw InvalidInputError("inclination bound: semi-major axis must exceed the Earth radius");
    if (!(c_max >= 0.0)) throw InvalidInputError("inclination bound: negative budget");
    if (!(eta > 0.0)) throw InvalidInputError("inclination bound: scale factor must be positive");
    double x = c_max / (2.0 * std::sqrt(kMu / a));
    if (x > 1.0)
        throw InvalidInputError("inclination bound: budget exceeds a half-turn of the velocity");
    return 2.0 * eta * std::asin(x);
}

// Widest node offset reachable with budget c_max at inclination i. The plane
// separation angle is converted to a node angle before eta derates it.
inline double raan_bound(double a, double inclination, double c_max, double eta) {
    if (!(a > kEarthRadius))
        throw InvalidInputError("raan bound: semi-major axis must exceed the Earth radius");
    if (!(inclination >= 0.0 && inclination <= kPi))
        throw InvalidInputError("raan bound: inclination outside [0, pi]");
    if (!(c_max >= 0.0)) throw InvalidInputError("raan bound: negative budget");
    if (!(eta > 0.0)) throw InvalidInputError("raan bound: scale factor must be positive");
    double sin_i = std::sin(inclination);
    if (sin_i == 0.0)
        throw UndefinedBoundError("raan bound: node changes are undefined on an equatorial orbit");
    double x = c_max / (2.0 * std::sqrt(kMu / a));
    if (x > 1.0)
        throw InvalidInputError("raan bound: budget exceeds a half-turn of the velocity");
    double delta_raw = 2.0 * std::asin(x);
    double arg = (std::cos(delta_raw) - std::cos(inclination) * std::cos(inclination)) /
                 (sin_i * sin_i);
    if (arg > 1.0 + 1e-12 || arg < -1.0 - 1e-12)
        throw InvalidInputError(
            "raan bound: plane separation " + std::to_string(rad2deg(delta_raw)) +
            " deg is not reachable by a node change at inclination " +
            std::to_string(rad2deg(inclination)) + " deg");
    return eta * std::acos(std::clamp(arg, -1.0, 1.0));
}

enum class GridMode { PhaseOnly, PlaneAndPhase };

// Candidate-slot grid shape. phase_count doubles as the total slot count in
// phase-only mode; plane offsets use quarter-bound spacing in plane-and-phase
// mode regardless of how many steps per side are kept.
struct SlotGridSpec {
    GridMode mode = GridMode::PlaneAndPhase;
    int phase_count = 24;
    int plane_steps_per_side = 4;
    double eta = 0.8;

    bool operator==(const SlotGridSpec&) const = default;
};

inline void validate_grid_spec(const SlotGridSpec& spec) {
    if (spec.phase_count < 1) throw InvalidInputError("slot grid: phase count must be positive");
    if (spec.mode == GridMode::PlaneAndPhase && spec.plane_steps_per_side < 1)
        throw InvalidInputError("slot grid: need at least one plane step per side");
    if (!(spec.eta > 0.0)) throw InvalidInputError("slot grid: scale factor must be positive");
}

inline int slots_per_stage(const SlotGridSpec& spec) {
    validate_grid_spec(spec);
    if (spec.mode == GridMode::PhaseOnly) return spec.phase_count;
    return (4 * spec.plane_steps_per_side + 1) * spec.phase_count;
}

/**
 * Candidate slots around an occupied slot, with explicit plane-step sizes.
 * Plane order: current plane first, then inclination offsets from -S to -1,
 * +1 to +S, then node offsets -S to -1, +1 to +S. Each plane carries
 * phase_count phase offsets q*(2pi/phase_count) starting at the current
 * phase, so index 0 is always the occupied slot itself.
 */
inline std::vector<OrbitalSlot> generate_slot_grid(const OrbitalSlot& current,
                                                   const SlotGridSpec& spec, double inc_step,
                                                   double raan_step) {
    validate_grid_spec(spec);
    validate_slot(current);
    std::vector<OrbitalSlot> slots;

    auto push_plane = [&](double inc, double raan, bool wrap) {
        if (!(inc >= 0.0 && inc <= kPi))
            throw InvalidInputError("slot grid: plane offset pushes inclination outside [0, pi]");
        for (int q = 0; q < spec.phase_count; ++q) {
            OrbitalSlot s = current;
            s.inclination = inc;
            s.raan = wrap ? wrap_two_pi(raan) : raan;
            s.arg_lat_epoch =
                q == 0 ? current.arg_lat_epoch
                       : wrap_two_pi(current.arg_lat_epoch + q * (kTwoPi / spec.phase_count));
            slots.push_back(s);
        }
    };

    if (spec.mode == GridMode::PhaseOnly) {
        push_plane(current.inclination, current.raan, false);
        return slots;
    }

    if (!(inc_step >= 0.0) || !(raan_step >= 0.0))
        throw InvalidInputError("slot grid: plane steps must be non-negative");
    int S = spec.plane_steps_per_side;
    slots.reserve(static_cast<std::size_t>(4 * S + 1) * spec.phase_count);
    push_plane(current.inclination, current.raan, false);
    for (int m = S; m >= 1; --m) push_plane(current.inclination - m * inc_step, current.raan, false);
    for (int m = 1; m <= S; ++m) push_plane(current.inclination + m * inc_step, current.raan, false);
    for (int m = S; m >= 1; --m)
        push_plane(current.inclination, current.raan - m * raan_step, true);
    for (int m = 1; m <= S; ++m)
        push_plane(current.inclination, current.raan + m * raan_step, true);
    return slots;
}

// Same grid with plane spacing derived from a delta-v budget: each step is a
// quarter of the reachable bound at the current plane.
inline std::vector<OrbitalSlot> generate_slot_grid(const OrbitalSlot& current,
                                                   const SlotGridSpec& spec,
                                                   double initial_budget) {
    validate_grid_spec(spec);
    if (spec.mode == GridMode::PhaseOnly)
        return generate_slot_grid(current, spec, 0.0, 0.0);
    if (!(initial_budget > 0.0))
        throw InvalidInputError("slot grid: plane-and-phase mode needs a positive budget");
    double inc_step =
        inclination_bound(current.semi_major_axis, initial_budget, spec.eta) / 4.0;
    double raan_step =
        raan_bound(current.semi_major_axis, current.inclination, initial_budget, spec.eta) / 4.0;
    return generate_slot_grid(current, spec, inc_step, raan_step);
}

} // namespace mcrp
