#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "maneuver.hpp"
#include "orbit.hpp"
#include "time_grid.hpp"
#include "visibility.hpp"

namespace mcrp {

// Position on a satellite's slot lattice: net plane steps away from the
// initial plane on each axis, plus an absolute phase-comb index. The initial
// slot is always {0, 0, 0}.
struct GridCoord {
    int plane_inc = 0;
    int plane_raan = 0;
    int phase = 0;

    auto operator<=>(const GridCoord&) const = default;
};

/**
 * Candidate-slot factory for one satellite. Slot geometry is a pure function
 * of (stage, coordinate) evaluated directly from the initial elements, so a
 * coordinate names the same bit-exact orbit no matter which path reached it;
 * in particular a zero coordinate delta always prices to exactly 0.
 *
 * Plane spacing is fixed once from the full initial budget. Edge costs cache
 * their plane and phasing parts separately; the cached sum is bit-identical
 * to re-pricing the two slots with transfer_cost.
 */
class SlotProvider {
public:
    SlotProvider(const OrbitalSlot& initial, const SlotGridSpec& spec, double budget,
                 const TimeGrid& grid)
        : initial_(initial), spec_(spec), grid_(grid) {
        validate_slot(initial);
        validate_grid_spec(spec);
        if (initial.ref_time != 1)
            throw InvalidInputError("slot provider: initial slot must be quoted at step 1");
        n_ = mean_motion(initial.semi_major_axis);
        phase_step_ = kTwoPi / spec.phase_count;
        if (spec.mode == GridMode::PlaneAndPhase) {
            if (!(budget > 0.0))
                throw InvalidInputError("slot provider: plane spacing needs a positive budget");
            inc_step_ = inclination_bound(initial.semi_major_axis, budget, spec.eta) / 4.0;
            raan_step_ = raan_bound(initial.semi_major_axis, initial.inclination, budget,
                                    spec.eta) /
                         4.0;
        }
    }

    const OrbitalSlot& initial_slot() const { return initial_; }
    const SlotGridSpec& grid_spec() const { return spec_; }
    const TimeGrid& time_grid() const { return grid_; }
    double inc_step() const { return inc_step_; }
    double raan_step() const { return raan_step_; }
    GridCoord initial_coord() const { return {0, 0, 0}; }
    int slots_per_stage() const { return mcrp::slots_per_stage(spec_); }

    OrbitalSlot slot(int s, const GridCoord& c) const {
        if (s == 0) {
            if (c != GridCoord{0, 0, 0})
                throw RangeError("slot provider: stage 0 holds only the initial coordinate");
            return initial_;
        }
        check_coord(c);
        OrbitalSlot out = initial_;
        out.inclination = inclination_of(c.plane_inc);
        out.raan = raan_of(c.plane_raan);
        out.arg_lat_epoch = phase_of(s, c.phase);
        out.ref_time = grid_.stage_start(s);
        return out;
    }

    // Candidate coordinates reachable from an occupied slot in one stage:
    // the occupied plane plus single-axis offsets, each carrying the full
    // phase comb. Order: current plane, inclination -S..-1, +1..+S, node
    // -S..-1, +1..+S; phases ascending within each plane.
    std::vector<GridCoord> candidates(const GridCoord& occupied) const {
        check_coord(occupied);
        std::vector<GridCoord> out;
        auto push_plane = [&](int ni, int nr) {
            for (int q = 0; q < spec_.phase_count; ++q) out.push_back({ni, nr, q});
        };
        if (spec_.mode == GridMode::PhaseOnly) {
            push_plane(0, 0);
            return out;
        }
        out.reserve(static_cast<std::size_t>(slots_per_stage()));
        int S = spec_.plane_steps_per_side;
        push_plane(occupied.plane_inc, occupied.plane_raan);
        for (int m = S; m >= 1; --m) push_plane(occupied.plane_inc - m, occupied.plane_raan);
        for (int m = 1; m <= S; ++m) push_plane(occupied.plane_inc + m, occupied.plane_raan);
        for (int m = S; m >= 1; --m) push_plane(occupied.plane_inc, occupied.plane_raan - m);
        for (int m = 1; m <= S; ++m) push_plane(occupied.plane_inc, occupied.plane_raan + m);
        return out;
    }

    // Cost of arriving at stage s (from the slot occupied through stage s-1).
    double edge_cost(int s, const GridCoord& from, const GridCoord& to) const {
        if (s < 1 || s > grid_.stages())
            throw RangeError("slot provider: transition stage out of range");
        if (s == 1 && from != GridCoord{0, 0, 0})
            throw RangeError("slot provider: stage-1 transitions start at the initial slot");
        check_coord(from);
        check_coord(to);

        double plane;
        auto pk = std::make_tuple(from.plane_inc, from.plane_raan, to.plane_inc, to.plane_raan);
        if (auto it = plane_cache_.find(pk); it != plane_cache_.end()) {
            plane = it->second;
        } else {
            plane = plane_change_cost(initial_.semi_major_axis, inclination_of(from.plane_inc),
                                      inclination_of(to.plane_inc),
                                      raan_of(to.plane_raan) - raan_of(from.plane_raan));
            plane_cache_.emplace(pk, plane);
        }

        double phase;
        auto qk = std::make_tuple(s, from.phase, to.phase);
        if (auto it = phase_cache_.find(qk); it != phase_cache_.end()) {
            phase = it->second;
        } else {
            phase = phasing_cost(initial_.semi_major_axis,
                                 wrap_pi(phase_of(s, to.phase) - phase_of(s, from.phase)))
                        .delta_v;
            phase_cache_.emplace(qk, phase);
        }
        return plane + phase;
    }

    // Plane offsets reachable from the initial plane in at most s transitions.
    std::vector<std::pair<int, int>> reachable_planes(int s) const {
        if (s < 0 || s > grid_.stages())
            throw RangeError("slot provider: stage count out of range");
        std::set<std::pair<int, int>> acc = {{0, 0}};
        if (spec_.mode == GridMode::PlaneAndPhase) {
            int S = spec_.plane_steps_per_side;
            for (int step = 0; step < s; ++step) {
                std::set<std::pair<int, int>> next = acc;
                for (auto [ni, nr] : acc)
                    for (int m = 1; m <= S; ++m) {
                        next.insert({ni - m, nr});
                        next.insert({ni + m, nr});
                        next.insert({ni, nr - m});
                        next.insert({ni, nr + m});
                    }
                acc = std::move(next);
            }
        }
        return {acc.begin(), acc.end()};
    }

private:
    void check_coord(const GridCoord& c) const {
        if (c.phase < 0 || c.phase >= spec_.phase_count)
            throw RangeError("slot provider: phase index out of range");
        if (spec_.mode == GridMode::PhaseOnly && (c.plane_inc != 0 || c.plane_raan != 0))
            throw RangeError("slot provider: phase-only lattice has no plane offsets");
    }
    double inclination_of(int ni) const {
        double inc = initial_.inclination + ni * inc_step_;
        if (!(inc >= 0.0 && inc <= kPi))
            throw InvalidInputError("slot provider: plane offset " + std::to_string(ni) +
                                    " pushes inclination outside [0, pi]");
        return inc;
    }
    double raan_of(int nr) const { return wrap_two_pi(initial_.raan + nr * raan_step_); }
    double phase_of(int s, int q) const {
        return wrap_two_pi(initial_.arg_lat_epoch +
                           n_ * grid_.seconds_between(1, grid_.stage_start(s)) +
                           q * phase_step_);
    }

    OrbitalSlot initial_;
    SlotGridSpec spec_;
    TimeGrid grid_;
    double n_ = 0.0;
    double phase_step_ = 0.0;
    double inc_step_ = 0.0;
    double raan_step_ = 0.0;
    mutable std::map<std::tuple<int, int, int, int>, double> plane_cache_;
    mutable std::map<std::tuple<int, int, int>, double> phase_cache_;
};

struct EdgeRef {
    int s = 1; // arrival stage: edge runs from stage s-1 to stage s
    int i = 0;
    int j = 0;
    double cost = 0.0;

    bool operator==(const EdgeRef&) const = default;
};

/**
 * Time-expanded reconfiguration graph for all satellites: a singleton
 * stage-0 vertex per satellite, per-stage candidate vertex lists, and dense
 * priced edges between adjacent stages.
 *
 * Geometric graphs materialize the lattice around the initial plane (the
 * stay projection); fixture graphs carry explicit cost matrices instead.
 */
class ReconfigurationGraph {
public:
    ReconfigurationGraph(std::vector<SlotProvider> providers, const TimeGrid& grid)
        : grid_(grid), geometric_(true), providers_(std::move(providers)) {
        if (providers_.empty()) throw InvalidInputError("graph: no satellites");
        coords_ = providers_[0].candidates({0, 0, 0});
        int K = static_cast<int>(providers_.size());
        int N = grid_.stages();
        int J = static_cast<int>(coords_.size());
        counts_.assign(K, std::vector<int>(N, J));
        slots_.resize(K);
        costs_.resize(K);
        for (int k = 0; k < K; ++k) {
            if (providers_[k].grid_spec() != providers_[0].grid_spec())
                throw InvalidInputError("graph: satellites disagree on the slot grid shape");
            if (providers_[k].time_grid() != grid_)
                throw InvalidInputError("graph: provider built on a different time grid");
            slots_[k].resize(N);
            costs_[k].resize(N);
            for (int s = 1; s <= N; ++s) {
                auto& layer = slots_[k][s - 1];
                layer.reserve(J);
                for (const auto& c : coords_) layer.push_back(providers_[k].slot(s, c));
                auto& mat = costs_[k][s - 1];
                if (s == 1) {
                    mat.resize(J);
                    for (int j = 0; j < J; ++j)
                        mat[j] = providers_[k].edge_cost(1, {0, 0, 0}, coords_[j]);
                } else {
                    mat.resize(static_cast<std::size_t>(J) * J);
                    for (int i = 0; i < J; ++i)
                        for (int j = 0; j < J; ++j)
                            mat[static_cast<std::size_t>(i) * J + j] =
                                providers_[k].edge_cost(s, coords_[i], coords_[j]);
                }
            }
        }
    }

    // Fixture graph from explicit vertex counts and cost matrices.
    // counts[k][s-1] vertices at stage s; costs[k][s-1] is row-major
    // (previous-stage vertex, vertex), with a single-row matrix at stage 1.
    ReconfigurationGraph(const TimeGrid& grid, std::vector<std::vector<int>> counts,
                         std::vector<std::vector<std::vector<double>>> costs)
        : grid_(grid), geometric_(false), counts_(std::move(counts)), costs_(std::move(costs)) {
        if (counts_.empty()) throw InvalidInputError("graph: no satellites");
        int N = grid_.stages();
        if (costs_.size() != counts_.size())
            throw InvalidInputError("graph: cost matrices do not match satellite count");
        for (std::size_t k = 0; k < counts_.size(); ++k) {
            if (static_cast<int>(counts_[k].size()) != N || static_cast<int>(costs_[k].size()) != N)
                throw InvalidInputError("graph: satellite " + std::to_string(k + 1) +
                                        " does not cover every stage");
            for (int s = 1; s <= N; ++s) {
                int J = counts_[k][s - 1];
                if (J < 1) throw InvalidInputError("graph: empty vertex set");
                if (counts_[k][s - 1] != counts_[0][s - 1])
                    throw InvalidInputError("graph: satellites must have equal per-stage "
                                            "vertex counts");
                int prev = s == 1 ? 1 : counts_[k][s - 2];
                const auto& mat = costs_[k][s - 1];
                if (mat.size() != static_cast<std::size_t>(prev) * J)
                    throw InvalidInputError("graph: stage " + std::to_string(s) +
                                            " cost matrix has the wrong shape");
                for (int i = 0; i < prev; ++i) {
                    bool has_zero = false;
                    for (int j = 0; j < J; ++j) {
                        double c = mat[static_cast<std::size_t>(i) * J + j];
                        if (std::isnan(c) || c < 0.0)
                            throw InvalidInputError("graph: edge costs must be >= 0");
                        has_zero = has_zero || c == 0.0;
                    }
                    if (!has_zero)
                        throw InvalidInputError(
                            "graph: stage " + std::to_string(s) + " vertex " + std::to_string(i) +
                            " has no zero-cost continuation");
                }
            }
        }
    }

    const TimeGrid& time_grid() const { return grid_; }
    bool geometric() const { return geometric_; }
    int satellites() const { return static_cast<int>(counts_.size()); }
    int stages() const { return grid_.stages(); }

    int slot_count(int s, int k) const {
        check_sat(k);
        if (s == 0) return 1;
        check_stage(s);
        return counts_[k - 1][s - 1];
    }

    double edge_cost(int s, int k, int i, int j) const {
        check_stage(s);
        check_sat(k);
        if (i < 0 || i >= slot_count(s - 1, k))
            throw RangeError("graph: source vertex out of range");
        if (j < 0 || j >= slot_count(s, k)) throw RangeError("graph: target vertex out of range");
        const auto& mat = costs_[k - 1][s - 1];
        return mat[static_cast<std::size_t>(i) * counts_[k - 1][s - 1] + j];
    }

    // Raw cost matrix into stage s, row-major with stride slot_count(s, k).
    const std::vector<double>& cost_matrix(int s, int k) const {
        check_stage(s);
        check_sat(k);
        return costs_[k - 1][s - 1];
    }

    const OrbitalSlot& slot(int s, int k, int j) const {
        require_geometry();
        check_sat(k);
        if (s == 0) {
            if (j != 0) throw RangeError("graph: stage 0 is a singleton");
            return providers_[k - 1].initial_slot();
        }
        check_stage(s);
        if (j < 0 || j >= slot_count(s, k)) throw RangeError("graph: vertex out of range");
        return slots_[k - 1][s - 1][j];
    }

    // Stage-(s-1) vertex i carried forward to stage s with no maneuver.
    OrbitalSlot continuation_slot(int s, int k, int i) const {
        require_geometry();
        check_stage(s);
        check_sat(k);
        if (i < 0 || i >= slot_count(s - 1, k)) throw RangeError("graph: vertex out of range");
        return providers_[k - 1].slot(s, s == 1 ? GridCoord{0, 0, 0} : coords_[i]);
    }

    const std::vector<OrbitalSlot>& stage_slots(int s, int k) const {
        require_geometry();
        check_stage(s);
        check_sat(k);
        return slots_[k - 1][s - 1];
    }

    const SlotProvider& provider(int k) const {
        require_geometry();
        check_sat(k);
        return providers_[k - 1];
    }

    const GridCoord& vertex_coord(int j) const {
        require_geometry();
        if (j < 0 || j >= static_cast<int>(coords_.size()))
            throw RangeError("graph: vertex out of range");
        return coords_[j];
    }

    double plan_count() const {
        double total = 1.0;
        for (int k = 1; k <= satellites(); ++k)
            for (int s = 1; s <= stages(); ++s) total *= slot_count(s, k);
        return total;
    }

private:
    void check_stage(int s) const {
        if (s < 1 || s > grid_.stages()) throw RangeError("graph: stage out of range");
    }
    void check_sat(int k) const {
        if (k < 1 || k > satellites()) throw RangeError("graph: satellite out of range");
    }
    void require_geometry() const {
        if (!geometric_)
            throw InvalidInputError("graph: fixture graphs carry no slot geometry");
    }

    TimeGrid grid_;
    bool geometric_;
    std::vector<SlotProvider> providers_;
    std::vector<GridCoord> coords_;
    std::vector<std::vector<int>> counts_;                     // [k][s-1]
    std::vector<std::vector<std::vector<OrbitalSlot>>> slots_; // [k][s-1][j]
    std::vector<std::vector<std::vector<double>>> costs_;      // [k][s-1][(i)*J+j]
};

inline ReconfigurationGraph build_graph(const std::vector<OrbitalSlot>& initial_slots,
                                        const TimeGrid& grid, const SlotGridSpec& spec,
                                        const std::vector<double>& budgets) {
    if (initial_slots.empty()) throw InvalidInputError("graph: no satellites");
    if (budgets.size() != initial_slots.size())
        throw InvalidInputError("graph: budget list does not match satellite count");
    for (double b : budgets)
        if (!(b > 0.0)) throw InvalidInputError("graph: budgets must be positive");
    std::vector<SlotProvider> providers;
    providers.reserve(initial_slots.size());
    for (std::size_t k = 0; k < initial_slots.size(); ++k)
        providers.emplace_back(initial_slots[k], spec, budgets[k], grid);
    return ReconfigurationGraph(std::move(providers), grid);
}

// Edges affordable in isolation with the given budget. The zero-cost stay
// edges always qualify.
inline std::vector<EdgeRef> feasible_edges(const ReconfigurationGraph& graph, int k,
                                           double budget) {
    if (std::isnan(budget)) throw InvalidInputError("feasible edges: budget is not a number");
    std::vector<EdgeRef> out;
    for (int s = 1; s <= graph.stages(); ++s)
        for (int i = 0; i < graph.slot_count(s - 1, k); ++i)
            for (int j = 0; j < graph.slot_count(s, k); ++j) {
                double c = graph.edge_cost(s, k, i, j);
                if (c <= budget) out.push_back({s, i, j, c});
            }
    return out;
}

// Visibility bits for every vertex of a geometric graph.
inline VisibilityTensor graph_visibility(const ReconfigurationGraph& graph,
                                         const std::vector<GroundTarget>& targets,
                                         double gmst0 = 0.0, int threads = 1) {
    std::vector<std::vector<std::vector<OrbitalSlot>>> stage_slots(graph.satellites());
    for (int k = 1; k <= graph.satellites(); ++k) {
        stage_slots[k - 1].resize(graph.stages());
        for (int s = 1; s <= graph.stages(); ++s)
            stage_slots[k - 1][s - 1] = graph.stage_slots(s, k);
    }
    return compute_visibility(stage_slots, targets, graph.time_grid(), gmst0, threads);
}

// In-memory fixture: explicit graph shape plus a hand-filled tensor.
struct ExplicitCore {
    std::vector<std::vector<int>> slot_counts;            // [k][s-1]
    std::vector<std::vector<std::vector<double>>> costs;  // [k][s-1][(i)*J+j]
    VisibilityTensor visibility;
};

} // namespace mcrp
