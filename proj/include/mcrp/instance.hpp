#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "maneuver.hpp"
#include "orbit.hpp"
#include "rewards.hpp"
#include "teg.hpp"
#include "time_grid.hpp"
#include "visibility.hpp"

namespace mcrp {

struct SatelliteSpec {
    OrbitalSlot initial;
    double c_max = 0.0;            // km/s
    bool budget_constrained = true; // whether c_max is enforced when solving

    bool operator==(const SatelliteSpec&) const = default;
};

/**
 * A complete reconfiguration problem: the time grid, the fleet with budgets,
 * the targets with rewards and thresholds, and the slot-lattice shape.
 *
 * Instances are descriptions; graphs and visibility tensors are derived on
 * demand. Fixture instances may instead carry an explicit core with
 * hand-written cost matrices and visibility bits, bypassing the geometry.
 */
struct McrpInstance {
    TimeGrid grid{1, 1.0, 1};
    std::vector<SatelliteSpec> satellites;
    std::vector<GroundTarget> targets;
    RewardModel rewards;
    SlotGridSpec slot_grid;
    double gmst0 = 0.0;
    std::optional<ExplicitCore> core;

    bool geometric() const { return !core.has_value(); }
};

inline void validate_instance(const McrpInstance& inst) {
    if (inst.satellites.empty()) throw InvalidInputError("instance: no satellites");
    if (!std::isfinite(inst.gmst0)) throw InvalidInputError("instance: gmst0 must be finite");
    for (const auto& t : inst.targets) validate_target(t);
    if (inst.rewards.targets() != static_cast<int>(inst.targets.size()))
        throw InvalidInputError("instance: reward model covers " +
                                std::to_string(inst.rewards.targets()) + " targets, instance has " +
                                std::to_string(inst.targets.size()));
    if (inst.rewards.grid() != inst.grid)
        throw InvalidInputError("instance: reward model built on a different time grid");

    if (inst.geometric()) {
        validate_grid_spec(inst.slot_grid);
        for (std::size_t k = 0; k < inst.satellites.size(); ++k) {
            const auto& sat = inst.satellites[k];
            validate_slot(sat.initial);
            if (sat.initial.ref_time != 1)
                throw InvalidInputError("instance: satellite " + std::to_string(k + 1) +
                                        " initial slot must be quoted at step 1");
            if (!(sat.c_max > 0.0) || !std::isfinite(sat.c_max))
                throw InvalidInputError("instance: satellite " + std::to_string(k + 1) +
                                        " needs a positive finite budget");
        }
        return;
    }

    const ExplicitCore& core = *inst.core;
    std::size_t K = inst.satellites.size();
    if (core.slot_counts.size() != K || core.costs.size() != K)
        throw InvalidInputError("instance: explicit core does not match the satellite count");
    for (const auto& sat : inst.satellites)
        if (!(sat.c_max >= 0.0)) throw InvalidInputError("instance: negative budget");
    // shape rules for counts and costs are enforced by the graph constructor
    ReconfigurationGraph graph(inst.grid, core.slot_counts, core.costs);
    const VisibilityTensor& vt = core.visibility;
    if (vt.grid() != inst.grid)
        throw InvalidInputError("instance: core visibility built on a different time grid");
    if (vt.satellites() != static_cast<int>(K))
        throw InvalidInputError("instance: core visibility satellite count mismatch");
    if (vt.targets() != static_cast<int>(inst.targets.size()))
        throw InvalidInputError("instance: core visibility target count mismatch");
    for (int k = 1; k <= static_cast<int>(K); ++k)
        for (int s = 1; s <= inst.grid.stages(); ++s)
            if (vt.slot_count(s, k) != graph.slot_count(s, k))
                throw InvalidInputError("instance: core visibility slot counts mismatch at stage " +
                                        std::to_string(s));
}

inline std::vector<SlotProvider> make_providers(const McrpInstance& inst) {
    if (!inst.geometric())
        throw InvalidInputError("instance: fixture cores have no slot providers");
    std::vector<SlotProvider> providers;
    providers.reserve(inst.satellites.size());
    for (const auto& sat : inst.satellites)
        providers.emplace_back(sat.initial, inst.slot_grid, sat.c_max, inst.grid);
    return providers;
}

inline ReconfigurationGraph build_instance_graph(const McrpInstance& inst) {
    if (inst.geometric()) return ReconfigurationGraph(make_providers(inst), inst.grid);
    return ReconfigurationGraph(inst.grid, inst.core->slot_counts, inst.core->costs);
}

inline VisibilityTensor instance_visibility(const McrpInstance& inst,
                                            const ReconfigurationGraph& graph, int threads = 1) {
    if (inst.geometric()) return graph_visibility(graph, inst.targets, inst.gmst0, threads);
    return inst.core->visibility;
}

} // namespace mcrp
