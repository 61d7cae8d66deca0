#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace mcrp {

// Search data shared by every solver run against one prepared instance:
// per-stage reward cells in the tensor's bit order, per-slot relaxed weights,
// and the per-satellite stage ceilings the bound is built from.
//
// One context per solver call. The exact stage evaluator reuses scratch
// buffers, so a context must not be shared across threads.
class SolveContext {
public:
    explicit SolveContext(const PreparedInstance& pi)
        : pi_(&pi), words_(pi.visibility.words_per_slot()) {
        const TimeGrid& grid = pi.instance.grid;
        const RewardModel& rm = pi.instance.rewards;
        int N = grid.stages();
        int K = pi.graph.satellites();
        int P = rm.targets();
        int steps = grid.steps_per_stage();

        cells_.resize(N);
        weights_.resize(N);
        ceiling_.assign(N, std::vector<double>(K, 0.0));
        for (int s = 1; s <= N; ++s) {
            auto& cells = cells_[s - 1];
            for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t)
                for (int p = 0; p < P; ++p) {
                    double reward = rm.reward(t, p);
                    if (reward <= 0.0) continue;
                    int r = rm.threshold(t, p);
                    int bit = p * steps + (t - grid.stage_start(s));
                    cells.push_back({bit, reward, reward / r, r});
                }
            weights_[s - 1].resize(K);
            for (int k = 1; k <= K; ++k) {
                int J = pi.graph.slot_count(s, k);
                auto& w = weights_[s - 1][k - 1];
                w.assign(J, 0.0);
                double best = 0.0;
                for (int j = 0; j < J; ++j) {
                    auto span = pi.visibility.slot_bits(s, k, j);
                    double acc = 0.0;
                    for (const Cell& c : cells)
                        if (span[c.bit >> 6] >> (c.bit & 63) & 1u) acc += c.relaxed;
                    w[j] = acc;
                    best = std::max(best, acc);
                }
                ceiling_[s - 1][k - 1] = best;
            }
        }
        for (auto& p : planes_) p.resize(words_);
    }

    const PreparedInstance& prepared() const { return *pi_; }
    int stages() const { return pi_->graph.stages(); }
    int satellites() const { return pi_->graph.satellites(); }
    int slot_count(int s) const { return pi_->graph.slot_count(s, 1); }

    // Relaxed worth of one slot: the threshold-diluted reward of every cell
    // it sees. Sums of these over satellites bound the true stage reward.
    double slot_weight(int s, int k, int j) const { return weights_[s - 1][k - 1][j]; }

    // Best relaxed worth any single slot offers satellite k at stage s.
    double stage_ceiling(int s, int k) const { return ceiling_[s - 1][k - 1]; }

    // Exact reward of a fully assigned stage, accumulated cell by cell in
    // the same order the plan evaluator uses so totals agree bitwise.
    double stage_reward(int s, const std::vector<int>& slots) {
        const auto& cells = cells_[s - 1];
        if (cells.empty()) return 0.0;
        int K = satellites();
        if (K > 15) return stage_reward_slow(s, slots);
        for (auto& p : planes_) std::fill(p.begin(), p.end(), 0u);
        for (int k = 1; k <= K; ++k) {
            auto span = pi_->visibility.slot_bits(s, k, slots[k - 1]);
            for (std::size_t w = 0; w < words_; ++w) {
                std::uint64_t carry = span[w];
                for (auto& plane : planes_) {
                    std::uint64_t prev = plane[w];
                    plane[w] = prev ^ carry;
                    carry &= prev;
                    if (carry == 0) break;
                }
            }
        }
        double z = 0.0;
        for (const Cell& c : cells) {
            std::size_t w = static_cast<std::size_t>(c.bit) >> 6;
            int sh = c.bit & 63;
            int seen = static_cast<int>(planes_[0][w] >> sh & 1u) |
                       static_cast<int>(planes_[1][w] >> sh & 1u) << 1 |
                       static_cast<int>(planes_[2][w] >> sh & 1u) << 2 |
                       static_cast<int>(planes_[3][w] >> sh & 1u) << 3;
            if (seen >= c.threshold) z += c.reward;
        }
        return z;
    }

private:
    struct Cell {
        int bit = 0;
        double reward = 0.0;
        double relaxed = 0.0;
        int threshold = 1;
    };

    double stage_reward_slow(int s, const std::vector<int>& slots) const {
        double z = 0.0;
        for (const Cell& c : cells_[s - 1]) {
            int seen = 0;
            for (int k = 1; k <= satellites(); ++k) {
                auto span = pi_->visibility.slot_bits(s, k, slots[k - 1]);
                seen += static_cast<int>(span[c.bit >> 6] >> (c.bit & 63) & 1u);
            }
            if (seen >= c.threshold) z += c.reward;
        }
        return z;
    }

    const PreparedInstance* pi_;
    std::size_t words_;
    std::vector<std::vector<Cell>> cells_;                 // [s-1], t-major p-inner
    std::vector<std::vector<std::vector<double>>> weights_; // [s-1][k-1][j]
    std::vector<std::vector<double>> ceiling_;              // [s-1][k-1]
    std::array<std::vector<std::uint64_t>, 4> planes_;      // bit-sliced seen counts
};

// Reward ceiling from the per-satellite relaxation: each satellite
// independently picks its best slot per stage and every cell pays reward/r
// per sighting. No plan can beat it.
struct UpperBoundReport {
    double total = 0.0;
    std::vector<double> per_stage;
    std::vector<std::vector<double>> per_satellite; // [s-1][k-1]
};

inline UpperBoundReport upper_bound(const SolveContext& ctx) {
    UpperBoundReport ub;
    ub.per_stage.resize(ctx.stages());
    ub.per_satellite.resize(ctx.stages());
    for (int s = 1; s <= ctx.stages(); ++s) {
        double zs = 0.0;
        auto& row = ub.per_satellite[s - 1];
        row.resize(ctx.satellites());
        for (int k = 1; k <= ctx.satellites(); ++k) {
            row[k - 1] = ctx.stage_ceiling(s, k);
            zs += row[k - 1];
        }
        ub.per_stage[s - 1] = zs;
        ub.total += zs;
    }
    return ub;
}

inline UpperBoundReport upper_bound(const PreparedInstance& pi) {
    SolveContext ctx(pi);
    return upper_bound(ctx);
}

// One branch-and-bound run over a window of consecutive stages.
struct WindowRequest {
    int first_stage = 1;
    int last_stage = 1;
    std::vector<int> entry;     // vertex each satellite occupies at first_stage - 1
    std::vector<double> spent;  // delta-v already paid before the window
    std::vector<double> limit;  // budget cap, +inf for unconstrained satellites
    double gap_tolerance = 0.0;
    double time_limit_seconds = std::numeric_limits<double>::infinity();
};

struct WindowResult {
    std::vector<std::vector<int>> assignment; // [stage offset][k-1]
    std::vector<double> stage_rewards;
    double objective = 0.0;
    double best_bound = 0.0;
    long long nodes = 0;
    bool completed = true; // false only when the time limit cut the search
};

namespace detail {

// Depth-first search over window assignments in stage-major satellite-inner
// slot-ascending order. The incumbent starts at the stay continuation, so a
// feasible plan always exists; pruning compares an inflated relaxed bound
// against the incumbent, and exact ties fall back to a prefix comparison so
// only lexicographically larger duplicates are cut. Bound inflation of one
// part in 1e12 dwarfs the worst-case accumulated rounding of the exact leaf
// sums, so a true optimum can never be pruned by float slop.
class WindowSearch {
public:
    WindowSearch(SolveContext& ctx, const WindowRequest& req) : ctx_(ctx), req_(req) {
        first_ = req.first_stage;
        W_ = req.last_stage - req.first_stage + 1;
        K_ = ctx.satellites();
        if (req.first_stage < 1 || req.last_stage > ctx.stages() || W_ < 1)
            throw RangeError("window search: stage window out of range");
        if (static_cast<int>(req.entry.size()) != K_ ||
            static_cast<int>(req.spent.size()) != K_ ||
            static_cast<int>(req.limit.size()) != K_)
            throw InvalidInputError("window search: entry state must cover every satellite");
        const auto& graph = ctx.prepared().graph;
        for (int k = 1; k <= K_; ++k) {
            int i = req.entry[k - 1];
            if (i < 0 || i >= graph.slot_count(first_ - 1, k))
                throw RangeError("window search: entry vertex out of range");
            if (req.spent[k - 1] > req.limit[k - 1])
                throw InvalidInputError("window search: entry spend already exceeds the budget");
        }

        rows_.assign(W_, std::vector<int>(K_, 0));
        prev_.assign(W_ + 1, std::vector<int>(K_, 0));
        prev_[0] = req.entry;
        spent_ = req.spent;
        stage_rw_.assign(W_, 0.0);

        suffix_.assign(W_, std::vector<double>(K_ + 1, 0.0));
        tail_.assign(W_, 0.0);
        root_bound_ = 0.0;
        for (int w = 0; w < W_; ++w) {
            int s = first_ + w;
            for (int k = K_; k >= 1; --k)
                suffix_[w][k - 1] = suffix_[w][k] + ctx.stage_ceiling(s, k);
            double zs = 0.0;
            for (int k = 1; k <= K_; ++k) zs += ctx.stage_ceiling(s, k);
            root_bound_ += zs;
        }
        for (int w = W_ - 2; w >= 0; --w) {
            int s = first_ + w + 1;
            double zs = 0.0;
            for (int k = 1; k <= K_; ++k) zs += ctx.stage_ceiling(s, k);
            tail_[w] = tail_[w + 1] + zs;
        }
    }

    WindowResult run() {
        seed_stay_incumbent();
        bool gap_stop = req_.gap_tolerance > 0.0 && gap_met();
        if (!gap_stop) {
            if (std::isfinite(req_.time_limit_seconds))
                deadline_ = std::chrono::steady_clock::now() +
                            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(req_.time_limit_seconds));
            descend(0);
            gap_stop = stopped_by_gap_;
        }
        WindowResult res;
        res.assignment = inc_rows_;
        res.stage_rewards = inc_stage_;
        res.objective = inc_z_;
        res.nodes = nodes_;
        res.completed = !expired_;
        res.best_bound = (expired_ || gap_stop) ? root_bound_ : inc_z_;
        return res;
    }

    double root_bound() const { return root_bound_; }

private:
    // Stay continuation from the entry vertices: each satellite takes its
    // lowest-index zero-cost edge at every stage. Always budget-feasible.
    void seed_stay_incumbent() {
        const auto& graph = ctx_.prepared().graph;
        std::vector<int> cur = prev_[0];
        inc_rows_.assign(W_, std::vector<int>(K_, 0));
        inc_stage_.assign(W_, 0.0);
        inc_z_ = 0.0;
        for (int w = 0; w < W_; ++w) {
            int s = first_ + w;
            for (int k = 1; k <= K_; ++k) {
                int J = graph.slot_count(s, k);
                int pick = -1;
                for (int j = 0; j < J; ++j)
                    if (graph.edge_cost(s, k, cur[k - 1], j) == 0.0) {
                        pick = j;
                        break;
                    }
                if (pick < 0) throw Error("window search: no zero-cost continuation");
                inc_rows_[w][k - 1] = pick;
            }
            cur = inc_rows_[w];
            inc_stage_[w] = ctx_.stage_reward(s, inc_rows_[w]);
            inc_z_ += inc_stage_[w];
        }
    }

    bool gap_met() const {
        if (root_bound_ == 0.0) return true;
        return (root_bound_ - inc_z_) / root_bound_ <= req_.gap_tolerance;
    }

    // True when the partial assignment through flat position d orders after
    // the incumbent, meaning the subtree holds only duplicates of equal
    // value that the tie-break would discard anyway.
    bool prefix_greater(int d) const {
        for (int pos = 0; pos <= d; ++pos) {
            int a = rows_[pos / K_][pos % K_];
            int b = inc_rows_[pos / K_][pos % K_];
            if (a != b) return a > b;
        }
        return false;
    }

    void leaf() {
        double total = locked_;
        bool better = total > inc_z_;
        if (!better && total == inc_z_) {
            for (int pos = 0; pos < W_ * K_; ++pos) {
                int a = rows_[pos / K_][pos % K_];
                int b = inc_rows_[pos / K_][pos % K_];
                if (a != b) {
                    better = a < b;
                    break;
                }
            }
        }
        if (better) {
            inc_rows_ = rows_;
            inc_stage_ = stage_rw_;
            inc_z_ = total;
            if (req_.gap_tolerance > 0.0 && gap_met()) stopped_by_gap_ = true;
        }
    }

    void descend(int d) {
        if (d == W_ * K_) {
            ++nodes_;
            leaf();
            return;
        }
        if ((++nodes_ & 1023) == 0 && deadline_ &&
            std::chrono::steady_clock::now() >= *deadline_)
            expired_ = true;
        if (expired_ || stopped_by_gap_) return;

        int w = d / K_;
        int k0 = d % K_;
        int s = first_ + w;
        int J = ctx_.slot_count(s);
        const auto& graph = ctx_.prepared().graph;
        const double* cost_row =
            graph.cost_matrix(s, k0 + 1).data() + static_cast<std::size_t>(prev_[w][k0]) * J;
        bool capped = std::isfinite(req_.limit[k0]);

        for (int j = 0; j < J; ++j) {
            double cost = cost_row[j];
            // An infinite price marks a transfer that cannot be flown at all,
            // so it is out even for satellites with no budget cap.
            if (!std::isfinite(cost)) continue;
            if (capped && spent_[k0] + cost > req_.limit[k0]) continue;

            rows_[w][k0] = j;
            double spent_before = spent_[k0];
            double locked_before = locked_;
            double relaxed_before = relaxed_;
            spent_[k0] = spent_before + cost;

            double extras;
            if (k0 == K_ - 1) {
                double zr = ctx_.stage_reward(s, rows_[w]);
                stage_rw_[w] = zr;
                locked_ = locked_before + zr;
                relaxed_ = 0.0;
                extras = tail_[w];
            } else {
                relaxed_ = relaxed_before + ctx_.slot_weight(s, k0 + 1, j);
                extras = relaxed_ + suffix_[w][k0 + 1] + tail_[w];
            }

            double bound = extras == 0.0 ? locked_ : (locked_ + extras) * kInflate;
            bool prune;
            if (bound < inc_z_)
                prune = true;
            else if (bound == inc_z_)
                prune = extras > 0.0 || prefix_greater(d);
            else
                prune = false;

            if (!prune) {
                if (k0 == K_ - 1) prev_[w + 1] = rows_[w];
                descend(d + 1);
            }

            spent_[k0] = spent_before;
            locked_ = locked_before;
            relaxed_ = relaxed_before;
            if (expired_ || stopped_by_gap_) return;
        }
    }

    static constexpr double kInflate = 1.0 + 1e-12;

    SolveContext& ctx_;
    const WindowRequest& req_;
    int first_ = 1, W_ = 0, K_ = 0;

    std::vector<std::vector<int>> rows_, prev_;
    std::vector<double> spent_, stage_rw_;
    std::vector<std::vector<double>> suffix_;
    std::vector<double> tail_;
    double locked_ = 0.0, relaxed_ = 0.0, root_bound_ = 0.0;

    std::vector<std::vector<int>> inc_rows_;
    std::vector<double> inc_stage_;
    double inc_z_ = 0.0;

    std::optional<std::chrono::steady_clock::time_point> deadline_;
    long long nodes_ = 0;
    bool expired_ = false, stopped_by_gap_ = false;
};

} // namespace detail

// Optimal assignment of the window's stages given the entry state. The
// returned plan is the lexicographically smallest optimum in stage-major
// satellite-inner order unless a positive gap tolerance stopped the search.
inline WindowResult solve_window(SolveContext& ctx, const WindowRequest& req) {
    detail::WindowSearch search(ctx, req);
    return search.run();
}

} // namespace mcrp
