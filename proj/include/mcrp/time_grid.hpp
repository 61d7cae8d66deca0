#pragma once

#include <string>

#include "errors.hpp"

namespace mcrp {

/**
 * Uniform planning horizon of `total_steps` time steps split into `stages`
 * equal decision stages.
 *
 * Steps are 1-indexed. Stage s (1-indexed) owns the half-open step range
 * [stage_start(s), stage_start(s+1)), i.e. the inclusive range
 * [stage_start(s), stage_end(s)]. Reconfiguration decisions take effect at
 * stage starts; the stage count must divide the step count exactly so every
 * stage spans the same duration.
 */
class TimeGrid {
public:
    TimeGrid(int total_steps, double step_seconds, int stages)
        : total_steps_(total_steps), step_seconds_(step_seconds), stages_(stages) {
        if (total_steps <= 0)
            throw InvalidInputError("time grid: total_steps must be positive, got " +
                                    std::to_string(total_steps));
        if (!(step_seconds > 0.0))
            throw InvalidInputError("time grid: step_seconds must be positive");
        if (stages <= 0)
            throw InvalidInputError("time grid: stages must be positive, got " +
                                    std::to_string(stages));
        if (total_steps % stages != 0)
            throw InvalidInputError(
                "time grid: total_steps=" + std::to_string(total_steps) +
                " is not divisible by stages=" + std::to_string(stages) +
                "; every stage must span an equal whole number of steps");
    }

    int total_steps() const { return total_steps_; }
    double step_seconds() const { return step_seconds_; }
    int stages() const { return stages_; }
    int steps_per_stage() const { return total_steps_ / stages_; }

    // First step of stage s, 1 <= s <= stages()+1; stage stages()+1 is the
    // virtual end marker total_steps()+1.
    int stage_start(int s) const {
        if (s < 1 || s > stages_ + 1)
            throw RangeError("time grid: stage index " + std::to_string(s) + " out of range");
        return (s - 1) * steps_per_stage() + 1;
    }

    // Last step of stage s (inclusive).
    int stage_end(int s) const {
        if (s < 1 || s > stages_)
            throw RangeError("time grid: stage index " + std::to_string(s) + " out of range");
        return s * steps_per_stage();
    }

    // Stage owning step t.
    int stage_of(int t) const {
        check_step(t);
        return (t - 1) / steps_per_stage() + 1;
    }

    bool contains(int t) const { return t >= 1 && t <= total_steps_; }

    void check_step(int t) const {
        if (!contains(t))
            throw RangeError("time grid: step " + std::to_string(t) + " outside [1, " +
                             std::to_string(total_steps_) + "]");
    }

    // Signed elapsed seconds from step t_from to step t_to.
    double seconds_between(int t_from, int t_to) const {
        return (static_cast<double>(t_to) - static_cast<double>(t_from)) * step_seconds_;
    }

    bool operator==(const TimeGrid& other) const = default;

private:
    int total_steps_;
    double step_seconds_;
    int stages_;
};

} // namespace mcrp
