#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "time_grid.hpp"

namespace mcrp {

// Constant reward for one target over an inclusive step range. Windows may
// cross stage boundaries; the owning stage of a cell is implied by its step.
struct RewardWindow {
    int target = 0;
    int t_begin = 1;
    int t_end = 1;
    double reward = 0.0;

    bool operator==(const RewardWindow&) const = default;
};

/**
 * Per-cell observation rewards and coverage thresholds on the step grid.
 * reward(t, p) is the payout when target p is covered at step t; threshold
 * (t, p) is how many satellites must see p simultaneously to count.
 *
 * The construction encoding (dense table or window list) is retained so a
 * model can be written back out exactly as it came in.
 */
class RewardModel {
public:
    enum class Encoding { Dense, Windows };

    RewardModel() : dense_(0) {}

    // values indexed (t-1)*targets + p
    static RewardModel dense(const TimeGrid& grid, int targets, std::vector<double> values) {
        RewardModel m;
        m.grid_ = grid;
        m.targets_ = check_target_count(targets);
        m.enc_ = Encoding::Dense;
        if (values.size() != static_cast<std::size_t>(grid.total_steps()) * targets)
            throw InvalidInputError("reward model: dense table has " +
                                    std::to_string(values.size()) + " cells, expected " +
                                    std::to_string(grid.total_steps() * targets));
        for (double v : values)
            if (!(v >= 0.0)) throw InvalidInputError("reward model: negative reward");
        m.dense_ = std::move(values);
        return m;
    }

    static RewardModel windows(const TimeGrid& grid, int targets,
                               std::vector<RewardWindow> spans) {
        RewardModel m;
        m.grid_ = grid;
        m.targets_ = check_target_count(targets);
        m.enc_ = Encoding::Windows;
        m.dense_.assign(static_cast<std::size_t>(grid.total_steps()) * targets, 0.0);
        for (const auto& w : spans) {
            if (w.target < 0 || w.target >= targets)
                throw InvalidInputError("reward model: window target " +
                                        std::to_string(w.target) + " out of range");
            if (w.t_begin < 1 || w.t_end > grid.total_steps() || w.t_begin > w.t_end)
                throw InvalidInputError("reward model: window steps [" +
                                        std::to_string(w.t_begin) + ", " +
                                        std::to_string(w.t_end) + "] out of range");
            if (!(w.reward >= 0.0)) throw InvalidInputError("reward model: negative reward");
            for (int t = w.t_begin; t <= w.t_end; ++t) {
                double& cell = m.dense_[m.cell_index(t, w.target)];
                if (cell != 0.0)
                    throw InvalidInputError("reward model: overlapping windows for target " +
                                            std::to_string(w.target) + " at step " +
                                            std::to_string(t));
                cell = w.reward;
            }
        }
        m.windows_ = std::move(spans);
        return m;
    }

    double reward(int t, int p) const { return dense_[cell_index(t, p)]; }

    int threshold(int t, int p) const {
        check_cell(t, p);
        auto it = overrides_.find({t, p});
        return it == overrides_.end() ? default_threshold_ : it->second;
    }

    void set_default_threshold(int r) {
        if (r < 1) throw InvalidInputError("reward model: threshold must be at least 1");
        default_threshold_ = r;
    }

    void add_threshold_override(int t, int p, int r) {
        check_cell(t, p);
        if (r < 1) throw InvalidInputError("reward model: threshold must be at least 1");
        overrides_[{t, p}] = r;
    }

    Encoding encoding() const { return enc_; }
    const std::vector<RewardWindow>& window_list() const { return windows_; }
    const std::vector<double>& dense_table() const { return dense_; }
    int targets() const { return targets_; }
    const TimeGrid& grid() const { return grid_; }
    int default_threshold() const { return default_threshold_; }
    const std::map<std::pair<int, int>, int>& threshold_overrides() const { return overrides_; }

    // Total reward available in one stage if every cell were covered.
    double stage_reward_ceiling(int s) const {
        double sum = 0.0;
        for (int t = grid_.stage_start(s); t <= grid_.stage_end(s); ++t)
            for (int p = 0; p < targets_; ++p) sum += reward(t, p);
        return sum;
    }

    bool operator==(const RewardModel&) const = default;

private:
    static int check_target_count(int targets) {
        if (targets < 0) throw InvalidInputError("reward model: negative target count");
        return targets;
    }
    void check_cell(int t, int p) const {
        grid_.check_step(t);
        if (p < 0 || p >= targets_)
            throw RangeError("reward model: target " + std::to_string(p) + " out of range");
    }
    std::size_t cell_index(int t, int p) const {
        check_cell(t, p);
        return static_cast<std::size_t>(t - 1) * targets_ + p;
    }

    TimeGrid grid_{1, 1.0, 1};
    int targets_ = 0;
    Encoding enc_ = Encoding::Dense;
    std::vector<RewardWindow> windows_;
    std::vector<double> dense_;
    int default_threshold_ = 1;
    std::map<std::pair<int, int>, int> overrides_;
};

} // namespace mcrp
