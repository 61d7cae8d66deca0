#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "instance.hpp"
#include "rewards.hpp"
#include "teg.hpp"
#include "visibility.hpp"

namespace mcrp {

// A reconfiguration plan: the slot index each satellite occupies at each
// stage. assignment[s-1][k-1] is the stage-s vertex, so path contiguity is
// structural; the edge taken at stage s runs from the stage s-1 choice, and
// stage 0 is always the singleton initial vertex.
struct ReconfigurationPlan {
    std::vector<std::vector<int>> assignment;

    int stages() const { return static_cast<int>(assignment.size()); }
    int slot(int s, int k) const { return assignment[s - 1][k - 1]; }

    bool operator==(const ReconfigurationPlan&) const = default;
};

// An instance with its derived artifacts materialized once. Everything is
// immutable after construction and plan evaluation is pure, so many plans
// can be scored concurrently against one shared copy.
struct PreparedInstance {
    McrpInstance instance;
    ReconfigurationGraph graph;
    VisibilityTensor visibility;
};

inline PreparedInstance prepare_instance(McrpInstance inst, int threads = 1) {
    validate_instance(inst);
    ReconfigurationGraph graph = build_instance_graph(inst);
    VisibilityTensor vis = instance_visibility(inst, graph, threads);
    return {std::move(inst), std::move(graph), std::move(vis)};
}

// Structural check. Shape or index problems are errors; they make the plan
// meaningless rather than merely infeasible.
inline void validate_plan(const ReconfigurationPlan& plan, const ReconfigurationGraph& graph) {
    if (plan.stages() != graph.stages())
        throw InvalidPlanError("plan: assigns " + std::to_string(plan.stages()) +
                               " stages, graph has " + std::to_string(graph.stages()));
    for (int s = 1; s <= graph.stages(); ++s) {
        const auto& row = plan.assignment[s - 1];
        if (static_cast<int>(row.size()) != graph.satellites())
            throw InvalidPlanError("plan: stage " + std::to_string(s) + " assigns " +
                                   std::to_string(row.size()) + " satellites, graph has " +
                                   std::to_string(graph.satellites()));
        for (int k = 1; k <= graph.satellites(); ++k)
            if (row[k - 1] < 0 || row[k - 1] >= graph.slot_count(s, k))
                throw InvalidPlanError("plan: stage " + std::to_string(s) + " satellite " +
                                       std::to_string(k) + " slot " + std::to_string(row[k - 1]) +
                                       " out of range");
    }
}

// Coverage indicators y on the absolute step grid: covered(t, p) says whether
// enough satellites saw target p at step t under the plan that produced it.
struct CoverageStates {
    int target_count = 0;
    std::vector<std::uint8_t> bits; // (t-1)*target_count + p

    bool covered(int t, int p) const {
        return bits[static_cast<std::size_t>(t - 1) * target_count + p] != 0;
    }
};

// The exact indicator of simultaneous coverage: y(t, p) = 1 iff the number
// of satellites whose chosen slot sees p at t reaches the threshold. It is
// an observed fact about the plan, not an optimization variable, so it stays
// 1 even where the reward is zero.
inline CoverageStates coverage_states(const ReconfigurationPlan& plan,
                                      const PreparedInstance& pi) {
    validate_plan(plan, pi.graph);
    const TimeGrid& grid = pi.instance.grid;
    int P = static_cast<int>(pi.instance.targets.size());
    int K = pi.graph.satellites();
    CoverageStates cs;
    cs.target_count = P;
    cs.bits.assign(static_cast<std::size_t>(grid.total_steps()) * P, 0);
    for (int s = 1; s <= grid.stages(); ++s)
        for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t)
            for (int p = 0; p < P; ++p) {
                int seen = 0;
                for (int k = 1; k <= K; ++k)
                    seen += pi.visibility.get(s, k, plan.slot(s, k), p, t) ? 1 : 0;
                if (seen >= pi.instance.rewards.threshold(t, p))
                    cs.bits[static_cast<std::size_t>(t - 1) * P + p] = 1;
            }
    return cs;
}

// Reward collected per stage; the total objective is their sum.
inline std::vector<double> stage_objectives(const CoverageStates& y, const RewardModel& rewards) {
    const TimeGrid& grid = rewards.grid();
    std::vector<double> z(grid.stages(), 0.0);
    for (int s = 1; s <= grid.stages(); ++s)
        for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t)
            for (int p = 0; p < rewards.targets(); ++p)
                if (y.covered(t, p)) z[s - 1] += rewards.reward(t, p);
    return z;
}

inline std::vector<double> stage_objectives(const ReconfigurationPlan& plan,
                                            const PreparedInstance& pi) {
    return stage_objectives(coverage_states(plan, pi), pi.instance.rewards);
}

inline double objective(const CoverageStates& y, const RewardModel& rewards) {
    double z = 0.0;
    for (double zs : stage_objectives(y, rewards)) z += zs;
    return z;
}

inline double objective(const ReconfigurationPlan& plan, const PreparedInstance& pi) {
    return objective(coverage_states(plan, pi), pi.instance.rewards);
}

// Transfer cost each satellite pays along its path.
inline std::vector<double> per_satellite_delta_v(const ReconfigurationPlan& plan,
                                                 const ReconfigurationGraph& graph) {
    validate_plan(plan, graph);
    std::vector<double> spent(graph.satellites(), 0.0);
    for (int k = 1; k <= graph.satellites(); ++k) {
        int prev = 0;
        for (int s = 1; s <= graph.stages(); ++s) {
            spent[k - 1] += graph.edge_cost(s, k, prev, plan.slot(s, k));
            prev = plan.slot(s, k);
        }
    }
    return spent;
}

// One budget overrun. Findings are data, not exceptions; a solver wants the
// complete list to debug against.
struct Violation {
    int satellite = 0;
    int stage = 0;      // stage whose transfer first pushed the satellite over
    double spent = 0.0; // total delta-v the full plan consumes
    double budget = 0.0;
    std::string message;
};

// Every budget violation in the plan. Budgets bind in stage order: satellite
// k is over as soon as its running transfer total exceeds c_max. Satellites
// outside the budget-constrained subset are never reported.
inline std::vector<Violation> check_feasibility(const ReconfigurationPlan& plan,
                                                const PreparedInstance& pi) {
    validate_plan(plan, pi.graph);
    std::vector<Violation> out;
    for (int k = 1; k <= pi.graph.satellites(); ++k) {
        const SatelliteSpec& sat = pi.instance.satellites[k - 1];
        if (!sat.budget_constrained) continue;
        double running = 0.0;
        int first_over = 0;
        int prev = 0;
        for (int s = 1; s <= pi.graph.stages(); ++s) {
            running += pi.graph.edge_cost(s, k, prev, plan.slot(s, k));
            if (first_over == 0 && running > sat.c_max) first_over = s;
            prev = plan.slot(s, k);
        }
        if (first_over != 0)
            out.push_back({k, first_over, running, sat.c_max,
                           "satellite " + std::to_string(k) + " exceeds its budget at stage " +
                               std::to_string(first_over) + ": spends " + std::to_string(running) +
                               " km/s, budget " + std::to_string(sat.c_max) + " km/s"});
    }
    return out;
}

// Budget satellite k still holds entering stage s, after paying for the
// prefix through stage s-1. s may run to stages()+1 for the post-plan
// leftover; a longer plan is fine as a prefix.
inline double remaining_budget(const ReconfigurationPlan& prefix, const PreparedInstance& pi,
                               int s, int k) {
    if (s < 1 || s > pi.graph.stages() + 1)
        throw RangeError("remaining budget: stage out of range");
    if (k < 1 || k > pi.graph.satellites())
        throw RangeError("remaining budget: satellite out of range");
    if (prefix.stages() < s - 1)
        throw InvalidPlanError("remaining budget: prefix covers " +
                               std::to_string(prefix.stages()) + " stages, need " +
                               std::to_string(s - 1));
    double left = pi.instance.satellites[k - 1].c_max;
    int prev = 0;
    for (int q = 1; q < s; ++q) {
        const auto& row = prefix.assignment[q - 1];
        if (static_cast<int>(row.size()) != pi.graph.satellites())
            throw InvalidPlanError("remaining budget: stage " + std::to_string(q) +
                                   " assigns the wrong satellite count");
        int j = row[k - 1];
        if (j < 0 || j >= pi.graph.slot_count(q, k))
            throw InvalidPlanError("remaining budget: slot out of range at stage " +
                                   std::to_string(q));
        left -= pi.graph.edge_cost(q, k, prev, j);
        prev = j;
    }
    return left;
}

// The do-nothing plan: at every stage each satellite takes its lowest-index
// zero-cost continuation. Feasible under any budget because it never spends.
inline ReconfigurationPlan all_stay_plan(const ReconfigurationGraph& graph) {
    ReconfigurationPlan plan;
    plan.assignment.assign(graph.stages(), std::vector<int>(graph.satellites(), 0));
    for (int k = 1; k <= graph.satellites(); ++k) {
        int prev = 0;
        for (int s = 1; s <= graph.stages(); ++s) {
            int chosen = -1;
            for (int j = 0; j < graph.slot_count(s, k) && chosen < 0; ++j)
                if (graph.edge_cost(s, k, prev, j) == 0.0) chosen = j;
            if (chosen < 0)
                throw Error("graph invariant broken: stage " + std::to_string(s) + " satellite " +
                            std::to_string(k) + " has no zero-cost continuation");
            plan.assignment[s - 1][k - 1] = chosen;
            prev = chosen;
        }
    }
    return plan;
}

} // namespace mcrp
