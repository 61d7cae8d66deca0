#pragma once

// Shared hand-built test instances.

#include <optional>
#include <vector>

#include <mcrp/instance.hpp>

namespace mcrp::fixtures {

/**
 * Two-stage, one-satellite fixture where spending early is a trap.
 *
 * Stage 1: staying (slot 0) earns 5; moving to slot 1 costs the whole 1.0
 * budget and earns 6. Stage 2: slot 0 earns nothing, slot 1 earns 10 and
 * costs 1.0 to reach from either slot. Plans: [0,0]=5, [0,1]=15, [1,0]=6,
 * [1,1]=16 but needs 2.0 of budget. A stage-greedy chooser takes the 6 and
 * strands itself; the optimum is [0,1] = 15; the zero-cost path earns 5.
 */
inline McrpInstance budget_trap_instance() {
    McrpInstance inst;
    inst.grid = TimeGrid(2, 60.0, 2);
    inst.satellites.resize(1);
    inst.satellites[0].c_max = 1.0;
    inst.satellites[0].budget_constrained = true;

    inst.targets = {{0.0, 0.0, 0.1}, {0.0, 0.5, 0.1}, {0.0, 1.0, 0.1}};
    // step 1: target 0 pays 5, target 1 pays 6; step 2: target 2 pays 10
    inst.rewards = RewardModel::windows(inst.grid, 3,
                                        {{0, 1, 1, 5.0}, {1, 1, 1, 6.0}, {2, 2, 2, 10.0}});

    ExplicitCore core{{{2, 2}},
                      {{{0.0, 1.0}, {0.0, 1.0, 0.0, 1.0}}},
                      VisibilityTensor(inst.grid, {{2, 2}}, 3)};
    core.visibility.set(1, 1, 0, 0, 1); // stage 1, slot 0 sees target 0
    core.visibility.set(1, 1, 1, 1, 1); // stage 1, slot 1 sees target 1
    core.visibility.set(2, 1, 1, 2, 2); // stage 2, slot 1 sees target 2
    inst.core = std::move(core);
    return inst;
}

} // namespace mcrp::fixtures
