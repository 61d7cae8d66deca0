#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace mcrp {

namespace detail {

// Shortest decimal text that parses back to the same double.
inline std::string lp_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw Error("lp export: cannot format coefficient");
    return std::string(buf, end);
}

// Accumulates one constraint or objective row, wrapping long lines so the
// file stays friendly to parsers with line-length limits. Finished lines go
// straight to the stream; only the line being built is held in memory, which
// keeps multi-gigabyte exports flat.
class LpRow {
public:
    LpRow(std::ostream& out, const std::string& head) : out_(out) { line_ = " " + head; }

    void term(const std::string& text) {
        if (line_.size() + text.size() + 1 > 240) {
            out_ << line_ << '\n';
            line_ = "  ";
        }
        line_ += ' ';
        line_ += text;
    }

    void finish(const std::string& tail) {
        if (!tail.empty()) term(tail);
        out_ << line_ << '\n';
    }

private:
    std::ostream& out_;
    std::string line_;
};

inline std::string lp_x(int s, int k, int i, int j) {
    return "x_s" + std::to_string(s) + "_k" + std::to_string(k) + "_i" + std::to_string(i + 1) +
           "_j" + std::to_string(j + 1);
}

inline std::string lp_y(int s, int t, int p) {
    return "y_s" + std::to_string(s) + "_t" + std::to_string(t) + "_p" + std::to_string(p + 1);
}

} // namespace detail

// The instance as an integer program in LP text format. Variables: x for
// the transfer each satellite takes into each stage, y for the coverage
// indicator of each step and target. Constraints: one departure from the
// initial slot, flow conservation through every intermediate slot, coverage
// counting against the threshold, and the delta-v budget for capped
// satellites. Edges priced at infinity get a fixing row instead of a budget
// coefficient so the text stays finite.
inline void export_lp(const PreparedInstance& pi, std::ostream& out) {
    const ReconfigurationGraph& graph = pi.graph;
    const RewardModel& rm = pi.instance.rewards;
    const TimeGrid& grid = pi.instance.grid;
    int N = graph.stages();
    int K = graph.satellites();
    int P = rm.targets();

    out << "\\ multi-stage constellation reconfiguration, reward-maximizing integer program\n";
    out << "Maximize\n";
    {
        detail::LpRow row(out, "obj:");
        bool any = false;
        for (int s = 1; s <= N; ++s)
            for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t)
                for (int p = 0; p < P; ++p) {
                    double reward = rm.reward(t, p);
                    if (reward <= 0.0) continue;
                    row.term("+ " + detail::lp_number(reward) + " " + detail::lp_y(s, t, p));
                    any = true;
                }
        if (!any) row.term("+ 0 " + detail::lp_y(1, 1, 0));
        row.finish("");
    }

    out << "Subject To\n";
    for (int k = 1; k <= K; ++k) {
        detail::LpRow row(out, "INIT_k" + std::to_string(k) + ":");
        for (int j = 0; j < graph.slot_count(1, k); ++j)
            row.term("+ 1 " + detail::lp_x(1, k, 0, j));
        row.finish("= 1");
    }
    for (int s = 2; s <= N; ++s)
        for (int k = 1; k <= K; ++k)
            for (int i = 0; i < graph.slot_count(s - 1, k); ++i) {
                detail::LpRow row(out, "FLOW_s" + std::to_string(s) + "_k" + std::to_string(k) +
                                           "_i" + std::to_string(i + 1) + ":");
                for (int j = 0; j < graph.slot_count(s, k); ++j)
                    row.term("+ 1 " + detail::lp_x(s, k, i, j));
                for (int h = 0; h < graph.slot_count(s - 2, k); ++h)
                    row.term("- 1 " + detail::lp_x(s - 1, k, h, i));
                row.finish("= 0");
            }
    for (int s = 1; s <= N; ++s)
        for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t)
            for (int p = 0; p < P; ++p) {
                detail::LpRow row(out, "COV_s" + std::to_string(s) + "_t" + std::to_string(t) +
                                           "_p" + std::to_string(p + 1) + ":");
                for (int k = 1; k <= K; ++k)
                    for (int j = 0; j < graph.slot_count(s, k); ++j) {
                        if (!pi.visibility.get(s, k, j, p, t)) continue;
                        for (int i = 0; i < graph.slot_count(s - 1, k); ++i)
                            row.term("+ 1 " + detail::lp_x(s, k, i, j));
                    }
                row.term("- " + std::to_string(rm.threshold(t, p)) + " " + detail::lp_y(s, t, p));
                row.finish(">= 0");
            }
    for (int k = 1; k <= K; ++k) {
        const SatelliteSpec& sat = pi.instance.satellites[k - 1];
        if (!sat.budget_constrained) continue;
        detail::LpRow row(out, "RES_k" + std::to_string(k) + ":");
        bool any = false;
        for (int s = 1; s <= N; ++s)
            for (int i = 0; i < graph.slot_count(s - 1, k); ++i)
                for (int j = 0; j < graph.slot_count(s, k); ++j) {
                    double c = graph.edge_cost(s, k, i, j);
                    if (c == 0.0 || !std::isfinite(c)) continue;
                    row.term("+ " + detail::lp_number(c) + " " + detail::lp_x(s, k, i, j));
                    any = true;
                }
        if (any)
            row.finish("<= " + detail::lp_number(sat.c_max));
        else
            row.finish("+ 0 " + detail::lp_x(1, k, 0, 0) + " <= " + detail::lp_number(sat.c_max));
    }
    for (int k = 1; k <= K; ++k)
        for (int s = 1; s <= N; ++s)
            for (int i = 0; i < graph.slot_count(s - 1, k); ++i)
                for (int j = 0; j < graph.slot_count(s, k); ++j) {
                    if (std::isfinite(graph.edge_cost(s, k, i, j))) continue;
                    detail::LpRow row(out, "BAN_s" + std::to_string(s) + "_k" + std::to_string(k) +
                                               "_i" + std::to_string(i + 1) + "_j" +
                                               std::to_string(j + 1) + ":");
                    row.term("+ 1 " + detail::lp_x(s, k, i, j));
                    row.finish("= 0");
                }

    out << "Binaries\n";
    {
        detail::LpRow row(out, "");
        for (int s = 1; s <= N; ++s)
            for (int k = 1; k <= K; ++k)
                for (int i = 0; i < graph.slot_count(s - 1, k); ++i)
                    for (int j = 0; j < graph.slot_count(s, k); ++j)
                        row.term(detail::lp_x(s, k, i, j));
        for (int s = 1; s <= N; ++s)
            for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t)
                for (int p = 0; p < P; ++p) row.term(detail::lp_y(s, t, p));
        row.finish("");
    }
    out << "End\n";
}

inline std::string export_lp(const PreparedInstance& pi) {
    std::ostringstream out;
    export_lp(pi, out);
    return std::move(out).str();
}

} // namespace mcrp
