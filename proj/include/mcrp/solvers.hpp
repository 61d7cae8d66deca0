#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "solver_core.hpp"

namespace mcrp {

// What every solver hands back. best_bound is a certified reward ceiling:
// the solver's own proof for the exact methods, the per-satellite relaxation
// for the policies, so objective <= best_bound always holds.
struct SolveReport {
    std::string method;
    double objective = 0.0;
    ReconfigurationPlan plan;
    std::vector<double> stage_objectives;
    double best_bound = 0.0;
    std::optional<double> duality_gap; // |best_bound - objective| / |objective|
    double runtime_seconds = 0.0;
    long long nodes = 0;
    int subproblems = 0;
    bool completed = true; // false only when a time limit cut the search
    std::optional<double> lp_relaxation_value;
};

namespace detail {

inline std::optional<double> relative_gap(double bound, double z) {
    if (z == 0.0) return std::nullopt;
    return std::abs(bound - z) / std::abs(z);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<double> budget_limits(const PreparedInstance& pi) {
    std::vector<double> limit(pi.graph.satellites());
    for (int k = 1; k <= pi.graph.satellites(); ++k) {
        const SatelliteSpec& sat = pi.instance.satellites[k - 1];
        limit[k - 1] = sat.budget_constrained ? sat.c_max
                                              : std::numeric_limits<double>::infinity();
    }
    return limit;
}

} // namespace detail

// Do nothing: every satellite keeps station for the whole horizon. The
// floor the other methods are measured against.
inline SolveReport solve_baseline(const PreparedInstance& pi) {
    auto t0 = std::chrono::steady_clock::now();
    SolveContext ctx(pi);
    SolveReport rep;
    rep.method = "baseline";
    rep.plan = all_stay_plan(pi.graph);
    rep.stage_objectives = stage_objectives(rep.plan, pi);
    for (double zs : rep.stage_objectives) rep.objective += zs;
    rep.best_bound = upper_bound(ctx).total;
    rep.duality_gap = detail::relative_gap(rep.best_bound, rep.objective);
    rep.runtime_seconds = detail::seconds_since(t0);
    return rep;
}

// Full enumeration in lexicographic stage-major satellite-inner order,
// scored by the plan evaluator. Exists as an independent check on the
// branch-and-bound solver, so it shares no search code with it. Strictly
// better objectives win; ties keep the earlier plan, which makes the result
// the lexicographically smallest optimum.
inline SolveReport solve_bruteforce(const PreparedInstance& pi, double plan_limit = 1e7) {
    auto t0 = std::chrono::steady_clock::now();
    const ReconfigurationGraph& graph = pi.graph;
    if (graph.plan_count() > plan_limit)
        throw LimitExceededError("brute force: " + std::to_string(graph.plan_count()) +
                                 " candidate plans exceed the cap of " +
                                 std::to_string(plan_limit) +
                                 "; use the branch-and-bound solver");
    int N = graph.stages();
    int K = graph.satellites();

    ReconfigurationPlan cur;
    cur.assignment.assign(N, std::vector<int>(K, 0));

    ReconfigurationPlan best;
    std::vector<double> best_stage;
    double best_z = -std::numeric_limits<double>::infinity();
    long long visited = 0;

    for (;;) {
        ++visited;
        bool feasible = true;
        for (int k = 1; k <= K && feasible; ++k) {
            const SatelliteSpec& sat = pi.instance.satellites[k - 1];
            double spent = 0.0;
            int prev = 0;
            for (int s = 1; s <= N; ++s) {
                double c = graph.edge_cost(s, k, prev, cur.assignment[s - 1][k - 1]);
                if (!std::isfinite(c)) {
                    feasible = false;
                    break;
                }
                if (sat.budget_constrained) {
                    spent += c;
                    if (spent > sat.c_max) {
                        feasible = false;
                        break;
                    }
                }
                prev = cur.assignment[s - 1][k - 1];
            }
        }
        if (feasible) {
            std::vector<double> zs = stage_objectives(cur, pi);
            double z = 0.0;
            for (double v : zs) z += v;
            if (z > best_z) {
                best = cur;
                best_z = z;
                best_stage = std::move(zs);
            }
        }

        int pos = N * K - 1;
        while (pos >= 0) {
            int s = pos / K + 1;
            int& v = cur.assignment[pos / K][pos % K];
            if (++v < graph.slot_count(s, pos % K + 1)) break;
            v = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    SolveReport rep;
    rep.method = "bruteforce";
    rep.plan = std::move(best);
    rep.stage_objectives = std::move(best_stage);
    rep.objective = best_z;
    rep.best_bound = best_z;
    rep.duality_gap = detail::relative_gap(rep.best_bound, rep.objective);
    rep.nodes = visited;
    rep.subproblems = 1;
    rep.runtime_seconds = detail::seconds_since(t0);
    return rep;
}

// Branch and bound over the whole horizon. With the defaults it proves
// optimality and returns the lexicographically smallest optimal plan; a
// positive gap tolerance trades that guarantee for an early stop once the
// incumbent is provably within the tolerance of the relaxation bound.
inline SolveReport solve_exact_bnb(
    const PreparedInstance& pi,
    double time_limit_seconds = std::numeric_limits<double>::infinity(),
    double gap_tolerance = 0.0) {
    if (!(time_limit_seconds > 0.0))
        throw InvalidInputError("exact solve: time limit must be positive");
    if (!(gap_tolerance >= 0.0) || !std::isfinite(gap_tolerance) || gap_tolerance > 1.0)
        throw InvalidInputError("exact solve: gap tolerance must lie in [0, 1]");
    auto t0 = std::chrono::steady_clock::now();
    SolveContext ctx(pi);
    int K = pi.graph.satellites();

    WindowRequest req;
    req.first_stage = 1;
    req.last_stage = pi.graph.stages();
    req.entry.assign(K, 0);
    req.spent.assign(K, 0.0);
    req.limit = detail::budget_limits(pi);
    req.gap_tolerance = gap_tolerance;
    req.time_limit_seconds = time_limit_seconds;
    WindowResult r = solve_window(ctx, req);

    SolveReport rep;
    rep.method = "exact";
    rep.plan.assignment = std::move(r.assignment);
    rep.stage_objectives = std::move(r.stage_rewards);
    rep.objective = r.objective;
    rep.best_bound = r.best_bound;
    rep.duality_gap = detail::relative_gap(rep.best_bound, rep.objective);
    rep.nodes = r.nodes;
    rep.subproblems = 1;
    rep.completed = r.completed;
    rep.runtime_seconds = detail::seconds_since(t0);
    return rep;
}

namespace detail {

// Shared driver for the sequential policies: slide a window of
// lookahead + 1 stages across the horizon, solve it to optimality given the
// committed prefix, commit its first stage, and move on. The final window
// is committed whole.
inline SolveReport rolling_policy(const PreparedInstance& pi, int lookahead, std::string method,
                                  double subproblem_time_limit_seconds) {
    if (!(subproblem_time_limit_seconds > 0.0))
        throw InvalidInputError(method + ": subproblem time limit must be positive");
    auto t0 = std::chrono::steady_clock::now();
    SolveContext ctx(pi);
    const ReconfigurationGraph& graph = pi.graph;
    int N = graph.stages();
    int K = graph.satellites();

    SolveReport rep;
    rep.method = std::move(method);
    rep.plan.assignment.reserve(N);
    rep.stage_objectives.reserve(N);

    std::vector<int> entry(K, 0);
    std::vector<double> spent(K, 0.0);
    std::vector<double> limit = budget_limits(pi);

    int s = 1;
    while (s <= N) {
        int last = std::min(s + lookahead, N);
        WindowRequest req;
        req.first_stage = s;
        req.last_stage = last;
        req.entry = entry;
        req.spent = spent;
        req.limit = limit;
        req.time_limit_seconds = subproblem_time_limit_seconds;
        WindowResult r = solve_window(ctx, req);
        rep.nodes += r.nodes;
        ++rep.subproblems;
        rep.completed = rep.completed && r.completed;

        int commit = last == N ? last - s + 1 : 1;
        for (int c = 0; c < commit; ++c) {
            const std::vector<int>& row = r.assignment[c];
            for (int k = 1; k <= K; ++k)
                spent[k - 1] += graph.edge_cost(s + c, k, entry[k - 1], row[k - 1]);
            entry = row;
            rep.plan.assignment.push_back(row);
            rep.stage_objectives.push_back(r.stage_rewards[c]);
        }
        s += commit;
    }

    for (double zs : rep.stage_objectives) rep.objective += zs;
    rep.best_bound = upper_bound(ctx).total;
    rep.duality_gap = relative_gap(rep.best_bound, rep.objective);
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

} // namespace detail

// Myopic policy: each stage is optimized on its own, given what the prefix
// already spent. Equivalent to a rolling horizon with no lookahead. The time
// limit applies to each stage subproblem separately.
inline SolveReport solve_mp(
    const PreparedInstance& pi,
    double subproblem_time_limit_seconds = std::numeric_limits<double>::infinity()) {
    return detail::rolling_policy(pi, 0, "mp", subproblem_time_limit_seconds);
}

// Rolling horizon policy with the given lookahead. lookahead = 0 reproduces
// the myopic plans; lookahead = stages - 1 solves the whole horizon at once
// and matches the exact solver. The time limit applies per window.
inline SolveReport solve_rhp(
    const PreparedInstance& pi, int lookahead,
    double subproblem_time_limit_seconds = std::numeric_limits<double>::infinity()) {
    if (lookahead < 0 || lookahead > pi.graph.stages() - 1)
        throw InvalidInputError("rolling horizon: lookahead must lie in [0, stages - 1], got " +
                                std::to_string(lookahead));
    return detail::rolling_policy(pi, lookahead, "rhp", subproblem_time_limit_seconds);
}

// Comparison ratios between solver outcomes. Each is a fraction, not a
// percentage, and is absent when its denominator is zero.
struct PolicyMetrics {
    std::optional<double> relative_performance; // (z_alg - z_reference) / z_alg
    std::optional<double> duality_gap;          // |z_ceiling - z_alg| / |z_alg|
    std::optional<double> improvement;          // (z_alg - z_baseline) / z_baseline
};

inline PolicyMetrics compute_metrics(double z_alg, double z_reference, double z_ceiling,
                                     double z_baseline) {
    PolicyMetrics m;
    if (z_alg != 0.0) {
        m.relative_performance = (z_alg - z_reference) / z_alg;
        m.duality_gap = std::abs(z_ceiling - z_alg) / std::abs(z_alg);
    }
    if (z_baseline != 0.0) m.improvement = (z_alg - z_baseline) / z_baseline;
    return m;
}

} // namespace mcrp
