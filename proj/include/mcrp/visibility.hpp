#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "angles.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "orbit.hpp"
#include "time_grid.hpp"

namespace mcrp {

// Observation target fixed to the rotating Earth surface.
struct GroundTarget {
    double lat = 0.0;           // geocentric latitude [rad], in [-pi/2, pi/2]
    double lon = 0.0;           // east longitude at epoch [rad]
    double min_elevation = 0.0; // elevation mask [rad], in [0, pi/2)

    bool operator==(const GroundTarget&) const = default;
};

inline void validate_target(const GroundTarget& g) {
    if (!(g.lat >= -kPi / 2.0 && g.lat <= kPi / 2.0))
        throw InvalidInputError("ground target: latitude outside [-pi/2, pi/2]");
    if (!(g.min_elevation >= 0.0 && g.min_elevation < kPi / 2.0))
        throw InvalidInputError("ground target: elevation mask outside [0, pi/2)");
}

// Inertial position of a surface target at step t. The Earth carries the
// target eastward at the sidereal rate; gmst0 fixes the inertial longitude
// origin of the rotating frame.
inline Vec3 target_position(const GroundTarget& tgt, int t, const TimeGrid& grid,
                            double gmst0 = 0.0) {
    grid.check_step(t);
    double lon_inertial = tgt.lon + gmst0 + kEarthRotationRate * (t * grid.step_seconds());
    double cl = std::cos(tgt.lat), sl = std::sin(tgt.lat);
    return {kEarthRadius * cl * std::cos(lon_inertial),
            kEarthRadius * cl * std::sin(lon_inertial),
            kEarthRadius * sl};
}

// Elevation of a satellite above a target's local horizon, both given as
// inertial positions. pi/2 when the satellite is at the target's zenith,
// negative below the horizon plane.
inline double elevation_from_positions(const Vec3& sat_position, const Vec3& tgt_position) {
    Vec3 los = sat_position - tgt_position;
    double d = norm(los);
    if (d == 0.0) return kPi / 2.0;
    double sin_el = dot(los, tgt_position) / (d * kEarthRadius);
    return std::asin(std::clamp(sin_el, -1.0, 1.0));
}

inline double elevation(const Vec3& sat_position, const GroundTarget& tgt, int t,
                        const TimeGrid& grid, double gmst0 = 0.0) {
    return elevation_from_positions(sat_position, target_position(tgt, t, grid, gmst0));
}

/**
 * Packed visibility bits indexed (stage s, satellite k, slot j, target p,
 * step t), with t restricted to the steps stage s owns.
 *
 * Each (s, k, j) sub-block starts on a 64-bit word boundary so distinct slots
 * can be filled concurrently without write races; bit order inside a block is
 * target-major, step-minor.
 */
class VisibilityTensor {
public:
    VisibilityTensor() = default;

    // slot_counts[k][s-1] = number of candidate slots of satellite k at stage s.
    VisibilityTensor(const TimeGrid& grid, std::vector<std::vector<int>> slot_counts,
                     int target_count)
        : grid_(grid), slot_counts_(std::move(slot_counts)), targets_(target_count) {
        if (targets_ < 0) throw InvalidInputError("visibility tensor: negative target count");
        if (slot_counts_.empty())
            throw InvalidInputError("visibility tensor: no satellites");
        std::size_t words = 0;
        block_offset_.resize(slot_counts_.size());
        for (std::size_t k = 0; k < slot_counts_.size(); ++k) {
            if (static_cast<int>(slot_counts_[k].size()) != grid_.stages())
                throw InvalidInputError(
                    "visibility tensor: satellite " + std::to_string(k + 1) +
                    " has slot counts for " + std::to_string(slot_counts_[k].size()) +
                    " stages, grid has " + std::to_string(grid_.stages()));
            block_offset_[k].resize(slot_counts_[k].size());
            for (std::size_t s = 0; s < slot_counts_[k].size(); ++s) {
                if (slot_counts_[k][s] < 0)
                    throw InvalidInputError("visibility tensor: negative slot count");
                block_offset_[k][s] = words;
                words += static_cast<std::size_t>(slot_counts_[k][s]) * words_per_slot();
            }
        }
        bits_.assign(words, 0);
    }

    const TimeGrid& grid() const { return grid_; }
    int stages() const { return grid_.stages(); }
    int satellites() const { return static_cast<int>(slot_counts_.size()); }
    int targets() const { return targets_; }
    int slot_count(int s, int k) const {
        check_stage_sat(s, k);
        return slot_counts_[k - 1][s - 1];
    }

    // Words holding one slot's (target, step) plane.
    std::size_t words_per_slot() const {
        return (static_cast<std::size_t>(targets_) * grid_.steps_per_stage() + 63) / 64;
    }

    bool get(int s, int k, int j, int p, int t) const {
        std::size_t bit = bit_index(s, k, j, p, t);
        return (bits_[bit >> 6] >> (bit & 63)) & 1u;
    }

    void set(int s, int k, int j, int p, int t, bool value = true) {
        std::size_t bit = bit_index(s, k, j, p, t);
        uint64_t mask = uint64_t{1} << (bit & 63);
        if (value)
            bits_[bit >> 6] |= mask;
        else
            bits_[bit >> 6] &= ~mask;
    }

    // Read-only access to one slot's packed plane (target-major, step-minor).
    std::span<const uint64_t> slot_bits(int s, int k, int j) const {
        check_slot(s, k, j);
        std::size_t off =
            block_offset_[k - 1][s - 1] + static_cast<std::size_t>(j) * words_per_slot();
        return {bits_.data() + off, words_per_slot()};
    }

    std::size_t set_bit_count() const {
        std::size_t n = 0;
        for (uint64_t w : bits_) n += std::popcount(w);
        return n;
    }

    bool same_bits(const VisibilityTensor& other) const { return bits_ == other.bits_; }

private:
    void check_stage_sat(int s, int k) const {
        if (s < 1 || s > grid_.stages())
            throw RangeError("visibility tensor: stage " + std::to_string(s) + " out of range");
        if (k < 1 || k > satellites())
            throw RangeError("visibility tensor: satellite " + std::to_string(k) +
                             " out of range");
    }
    void check_slot(int s, int k, int j) const {
        check_stage_sat(s, k);
        if (j < 0 || j >= slot_counts_[k - 1][s - 1])
            throw RangeError("visibility tensor: slot " + std::to_string(j) + " out of range");
    }
    std::size_t bit_index(int s, int k, int j, int p, int t) const {
        check_slot(s, k, j);
        if (p < 0 || p >= targets_)
            throw RangeError("visibility tensor: target " + std::to_string(p) + " out of range");
        if (grid_.stage_of(t) != s)
            throw RangeError("visibility tensor: step " + std::to_string(t) +
                             " does not belong to stage " + std::to_string(s));
        int t_local = t - grid_.stage_start(s);
        std::size_t off =
            block_offset_[k - 1][s - 1] + static_cast<std::size_t>(j) * words_per_slot();
        return off * 64 + static_cast<std::size_t>(p) * grid_.steps_per_stage() + t_local;
    }

    TimeGrid grid_{1, 1.0, 1};
    std::vector<std::vector<int>> slot_counts_; // [k][s-1]
    std::vector<std::vector<std::size_t>> block_offset_;
    int targets_ = 0;
    std::vector<uint64_t> bits_;
};

/**
 * Visibility bits for explicit candidate-slot lists: stage_slots[k][s-1][j]
 * is slot j of satellite k at stage s. A bit is set when the slot's satellite
 * sees the target at or above the target's elevation mask at that step.
 *
 * `threads` only splits the work; the output is bit-identical for any count
 * because every (s, k, j) sub-block is written by exactly one worker.
 */
inline VisibilityTensor compute_visibility(
    const std::vector<std::vector<std::vector<OrbitalSlot>>>& stage_slots,
    const std::vector<GroundTarget>& targets, const TimeGrid& grid, double gmst0 = 0.0,
    int threads = 1) {
    for (const auto& t : targets) validate_target(t);
    std::vector<std::vector<int>> counts(stage_slots.size());
    for (std::size_t k = 0; k < stage_slots.size(); ++k) {
        counts[k].reserve(stage_slots[k].size());
        for (const auto& slots : stage_slots[k]) counts[k].push_back(static_cast<int>(slots.size()));
    }
    VisibilityTensor tensor(grid, counts, static_cast<int>(targets.size()));

    struct Item {
        int s, k, j;
    };
    std::vector<Item> items;
    for (std::size_t k = 0; k < stage_slots.size(); ++k)
        for (std::size_t s = 0; s < stage_slots[k].size(); ++s)
            for (std::size_t j = 0; j < stage_slots[k][s].size(); ++j)
                items.push_back({static_cast<int>(s + 1), static_cast<int>(k + 1),
                                 static_cast<int>(j)});

    auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            auto [s, k, j] = items[idx];
            const OrbitalSlot& slot = stage_slots[k - 1][s - 1][j];
            for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t) {
                Vec3 pos = propagate(slot, t, grid).position;
                for (int p = 0; p < static_cast<int>(targets.size()); ++p) {
                    double el = elevation(pos, targets[p], t, grid, gmst0);
                    if (el >= targets[p].min_elevation) tensor.set(s, k, j, p, t);
                }
            }
        }
    };

    int nthreads = std::max(1, threads);
    if (nthreads == 1 || items.size() < 2) {
        fill(0, items.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (items.size() + nthreads - 1) / nthreads;
        for (int w = 0; w < nthreads; ++w) {
            std::size_t b = std::min(items.size(), w * chunk);
            std::size_t e = std::min(items.size(), b + chunk);
            if (b < e) pool.emplace_back(fill, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return tensor;
}

} // namespace mcrp
