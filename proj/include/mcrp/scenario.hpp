#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "instance.hpp"
#include "lp_export.hpp"
#include "model.hpp"
#include "solvers.hpp"

namespace mcrp {

// ---------------------------------------------------------------------------
// Random test-instance families
// ---------------------------------------------------------------------------

enum class InstanceFamily { Static, Dynamic };

/**
 * Knobs for the two random families. The defaults are the experiment
 * settings: a Walker-delta 80deg:K/K/0 fleet at a per-instance altitude in
 * [700, 2000] km, ten targets inside +-80deg latitude with a 5deg elevation
 * mask, 0.6 km/s budgets, and a 5-day horizon at 100 s steps. Static keeps
 * unit rewards everywhere; dynamic pays each target only during its assigned
 * stage.
 */
struct InstanceRecipe {
    InstanceFamily family = InstanceFamily::Static;
    int slots = 50;      // phase slots per stage (J)
    int stages = 3;      // N
    int satellites = 3;  // K
    std::uint64_t seed = 0;

    int targets = 10; // P
    int total_steps = 4320;
    double step_seconds = 100.0;
    double altitude_min_km = 700.0;
    double altitude_max_km = 2000.0;
    double latitude_bound_deg = 80.0;
    double min_elevation_deg = 5.0;
    double c_max_kms = 0.6;
    double walker_inclination_deg = 80.0;
};

namespace detail {

// The one random stream behind instance generation. Draw order is part of
// each generator's contract: reordering draws silently changes every seeded
// instance, so treat the sequence as frozen.
class SeededDraws {
public:
    explicit SeededDraws(std::uint64_t seed) : gen_(seed) {}

    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; } // [0, 1)
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    int upto(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

private:
    std::mt19937_64 gen_;
};

// Degrees sampled from the stream convert to radians once, here, so the
// stored angle always has an exact degree preimage for serialization.
inline double clamped_angle(double deg) {
    double rad = deg2rad(deg);
    return rad >= kTwoPi ? 0.0 : rad;
}

} // namespace detail

inline McrpInstance generate_random_instance(const InstanceRecipe& recipe) {
    if (recipe.slots < 1) throw InvalidInputError("recipe: need at least one slot");
    if (recipe.stages < 1) throw InvalidInputError("recipe: need at least one stage");
    if (recipe.satellites < 1) throw InvalidInputError("recipe: need at least one satellite");
    if (recipe.targets < 1) throw InvalidInputError("recipe: need at least one target");
    if (!(recipe.altitude_min_km > 0.0) || !(recipe.altitude_max_km >= recipe.altitude_min_km))
        throw InvalidInputError("recipe: altitude range is empty or non-positive");
    if (!(recipe.latitude_bound_deg >= 0.0 && recipe.latitude_bound_deg <= 90.0))
        throw InvalidInputError("recipe: latitude bound outside [0, 90] deg");
    if (!(recipe.min_elevation_deg >= 0.0 && recipe.min_elevation_deg < 90.0))
        throw InvalidInputError("recipe: elevation mask outside [0, 90) deg");
    if (!(recipe.c_max_kms > 0.0)) throw InvalidInputError("recipe: budget must be positive");
    if (!(recipe.walker_inclination_deg > 0.0 && recipe.walker_inclination_deg < 180.0))
        throw InvalidInputError("recipe: Walker inclination outside (0, 180) deg");

    McrpInstance inst;
    inst.grid = TimeGrid(recipe.total_steps, recipe.step_seconds, recipe.stages);

    // Frozen draw order: altitude, then (lat, lon) per target.
    detail::SeededDraws draws(recipe.seed);
    double altitude_km = draws.range(recipe.altitude_min_km, recipe.altitude_max_km);

    inst.satellites.resize(recipe.satellites);
    for (int k = 1; k <= recipe.satellites; ++k) {
        SatelliteSpec& sat = inst.satellites[k - 1];
        sat.initial.semi_major_axis = kEarthRadius + altitude_km;
        sat.initial.inclination = deg2rad(recipe.walker_inclination_deg);
        sat.initial.raan = detail::clamped_angle(360.0 * (k - 1) / recipe.satellites);
        sat.initial.arg_lat_epoch = 0.0;
        sat.initial.ref_time = 1;
        sat.c_max = recipe.c_max_kms;
        sat.budget_constrained = true;
    }

    inst.targets.resize(recipe.targets);
    for (GroundTarget& tgt : inst.targets) {
        tgt.lat = deg2rad(draws.range(-recipe.latitude_bound_deg, recipe.latitude_bound_deg));
        tgt.lon = deg2rad(draws.range(-180.0, 180.0));
        tgt.min_elevation = deg2rad(recipe.min_elevation_deg);
    }

    std::vector<RewardWindow> spans;
    spans.reserve(recipe.targets);
    if (recipe.family == InstanceFamily::Static) {
        for (int p = 0; p < recipe.targets; ++p)
            spans.push_back({p, 1, recipe.total_steps, 1.0});
    } else {
        for (int p = 0; p < recipe.targets; ++p) {
            int s = p % recipe.stages + 1;
            spans.push_back({p, inst.grid.stage_start(s), inst.grid.stage_end(s), 1.0});
        }
    }
    inst.rewards = RewardModel::windows(inst.grid, recipe.targets, std::move(spans));

    inst.slot_grid.mode = GridMode::PhaseOnly;
    inst.slot_grid.phase_count = recipe.slots;
    inst.gmst0 = 0.0;
    return inst;
}

/**
 * Tiny random instances sized for exhaustive enumeration: K <= 2 satellites,
 * N <= 3 stages, at most 6 phase slots capped so the full plan count stays
 * below ~3e4, up to 3 targets, short horizons, budgets in (0, 0.4] km/s with
 * an occasional uncapped satellite, coarse random rewards (deliberately
 * collision-prone to exercise tie-breaking), and a few threshold overrides.
 */
inline McrpInstance generate_micro_instance(std::uint64_t seed) {
    detail::SeededDraws draws(seed);

    int K = 1 + draws.upto(2);
    int N = 1 + draws.upto(3);
    int steps_per_stage = 1 + draws.upto(8);
    int P = 1 + draws.upto(3);
    double step_seconds = 30.0 + 15.0 * draws.upto(4);

    int cap = 2;
    for (int j = 6; j >= 2; --j) {
        long long plans = 1;
        for (int e = 0; e < N * K; ++e) plans *= j;
        if (plans <= 30000) {
            cap = j;
            break;
        }
    }
    int J = 2 + draws.upto(cap - 1);

    McrpInstance inst;
    inst.grid = TimeGrid(N * steps_per_stage, step_seconds, N);
    inst.gmst0 = detail::clamped_angle(draws.range(0.0, 360.0));

    inst.satellites.resize(K);
    for (SatelliteSpec& sat : inst.satellites) {
        sat.initial.semi_major_axis = kEarthRadius + draws.range(700.0, 2000.0);
        sat.initial.inclination = deg2rad(draws.range(20.0, 160.0));
        sat.initial.raan = detail::clamped_angle(draws.range(0.0, 360.0));
        sat.initial.arg_lat_epoch = detail::clamped_angle(draws.range(0.0, 360.0));
        sat.initial.ref_time = 1;
        sat.c_max = 0.4 * (1.0 - draws.unit()); // (0, 0.4]
        sat.budget_constrained = draws.upto(8) != 0;
    }

    inst.targets.resize(P);
    for (GroundTarget& tgt : inst.targets) {
        tgt.lat = deg2rad(draws.range(-80.0, 80.0));
        tgt.lon = deg2rad(draws.range(-180.0, 180.0));
        tgt.min_elevation = deg2rad(draws.range(0.0, 15.0));
    }

    int T = inst.grid.total_steps();
    std::vector<double> table(static_cast<std::size_t>(T) * P, 0.0);
    for (int t = 1; t <= T; ++t)
        for (int p = 0; p < P; ++p) {
            static constexpr double kLevels[8] = {0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 0.5, 1.5};
            table[static_cast<std::size_t>(t - 1) * P + p] = kLevels[draws.upto(8)];
        }
    inst.rewards = RewardModel::dense(inst.grid, P, std::move(table));
    int overrides = draws.upto(3);
    for (int i = 0; i < overrides; ++i) {
        int t = 1 + draws.upto(T);
        int p = draws.upto(P);
        inst.rewards.add_threshold_override(t, p, 1 + draws.upto(2));
    }

    inst.slot_grid.mode = GridMode::PhaseOnly;
    inst.slot_grid.phase_count = J;
    return inst;
}

// ---------------------------------------------------------------------------
// Hurricane Harvey case study
// ---------------------------------------------------------------------------

struct HarveyTrackRecord {
    std::string time_utc;
    double lat_deg_north = 0.0;
    double lon_deg_west = 0.0;
    std::string category;
    int reward = 0;

    bool operator==(const HarveyTrackRecord&) const = default;
};

struct HarveySatelliteRecord {
    double altitude_km = 0.0;
    double inclination_deg = 0.0;
    double raan_deg = 0.0;
    double arg_lat_deg = 0.0;
    double c_max_kms = 0.0;

    bool operator==(const HarveySatelliteRecord&) const = default;
};

// Greenwich mean sidereal angle at the case-study epoch, 2017-08-23 12:00
// UTC (JD 2457989.0), from the IAU 1982 GMST polynomial. Kept in degrees so
// instance files carry the exact constant.
inline constexpr double kHarveyGmst0Deg = 151.97225879900753;

inline constexpr double kHarveyHorizonSeconds = 734400.0; // 8.5 days
inline constexpr int kHarveyTargetCount = 17;
inline constexpr double kHarveyElevationDeg = 10.0;

inline std::string harvey_track_path() { return std::string(MCRP_DATA_DIR) + "/harvey_track.csv"; }
inline std::string harvey_satellites_path() {
    return std::string(MCRP_DATA_DIR) + "/harvey_sats.csv";
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline double parse_csv_number(const std::string& field, const std::string& file, int row) {
    try {
        std::size_t used = 0;
        double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file + " row " + std::to_string(row) + ": bad number '" + field + "'");
    }
}

inline std::vector<std::string> read_csv_rows(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(line);
    }
    if (rows.empty()) throw ParseError(path + ": empty file");
    return rows;
}

} // namespace detail

// Storm-category weights: depression 1, storm 2, hurricane 3, major 4.
inline int harvey_category_reward(const std::string& category) {
    if (category == "Tropical Depression") return 1;
    if (category == "Tropical Storm") return 2;
    if (category == "Category 1-2 Hurricane") return 3;
    if (category == "Category 3+ Major Hurricane") return 4;
    throw ParseError("unknown storm category '" + category + "'");
}

inline std::vector<HarveyTrackRecord> load_harvey_track(const std::string& path) {
    std::vector<std::string> rows = detail::read_csv_rows(path);
    if (rows[0] != "time_utc,lat_deg_north,lon_deg_west,category,reward")
        throw ParseError(path + " row 1: unexpected header");
    std::vector<HarveyTrackRecord> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        int row = static_cast<int>(r) + 1;
        std::vector<std::string> f = detail::split_csv_row(rows[r]);
        if (f.size() != 5)
            throw ParseError(path + " row " + std::to_string(row) + ": expected 5 fields, got " +
                             std::to_string(f.size()));
        HarveyTrackRecord rec;
        rec.time_utc = f[0];
        rec.lat_deg_north = detail::parse_csv_number(f[1], path, row);
        rec.lon_deg_west = detail::parse_csv_number(f[2], path, row);
        rec.category = f[3];
        rec.reward = static_cast<int>(detail::parse_csv_number(f[4], path, row));
        if (rec.reward != harvey_category_reward(rec.category))
            throw ParseError(path + " row " + std::to_string(row) + ": reward " +
                             std::to_string(rec.reward) + " does not match category '" +
                             rec.category + "'");
        out.push_back(std::move(rec));
    }
    if (static_cast<int>(out.size()) != kHarveyTargetCount)
        throw ParseError(path + ": expected " + std::to_string(kHarveyTargetCount) +
                         " track records, got " + std::to_string(out.size()));
    return out;
}

inline std::vector<HarveySatelliteRecord> load_harvey_satellites(const std::string& path) {
    std::vector<std::string> rows = detail::read_csv_rows(path);
    if (rows[0] != "altitude_km,inclination_deg,raan_deg,arg_lat_deg,c_max_kms")
        throw ParseError(path + " row 1: unexpected header");
    std::vector<HarveySatelliteRecord> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        int row = static_cast<int>(r) + 1;
        std::vector<std::string> f = detail::split_csv_row(rows[r]);
        if (f.size() != 5)
            throw ParseError(path + " row " + std::to_string(row) + ": expected 5 fields, got " +
                             std::to_string(f.size()));
        out.push_back({detail::parse_csv_number(f[0], path, row),
                       detail::parse_csv_number(f[1], path, row),
                       detail::parse_csv_number(f[2], path, row),
                       detail::parse_csv_number(f[3], path, row),
                       detail::parse_csv_number(f[4], path, row)});
    }
    if (out.empty()) throw ParseError(path + ": no satellite rows");
    return out;
}

struct HarveyOptions {
    int stages = 8;
    double step_seconds = 100.0;
    int phase_count = 24;
    int plane_steps_per_side = 4;
};

/**
 * The case-study instance: 17 stationary storm positions rewarded only
 * during their 12-hour windows, weighted by storm category, watched by the
 * four bundled satellites over plane-and-phase slot grids. step_seconds and
 * the grid shape can be coarsened for desk-scale runs.
 */
inline McrpInstance make_harvey_instance(const std::string& track_path,
                                         const std::string& sats_path,
                                         const HarveyOptions& opt = {}) {
    if (!(opt.step_seconds > 0.0))
        throw InvalidInputError("harvey: step length must be positive");
    double steps = kHarveyHorizonSeconds / opt.step_seconds;
    int T = static_cast<int>(steps);
    if (static_cast<double>(T) != steps)
        throw InvalidInputError("harvey: the 734400 s horizon is not a whole number of " +
                                std::to_string(opt.step_seconds) + " s steps");
    if (opt.stages < 1 || T % opt.stages != 0)
        throw InvalidInputError(
            "harvey: " + std::to_string(T) + " steps do not divide into " +
            std::to_string(opt.stages) +
            " equal stages; pick a stage count whose windows hold a whole number of steps");
    if (T % kHarveyTargetCount != 0)
        throw InvalidInputError("harvey: step length must keep the 17 twelve-hour target "
                                "windows a whole number of steps");

    std::vector<HarveyTrackRecord> track = load_harvey_track(track_path);
    std::vector<HarveySatelliteRecord> sats = load_harvey_satellites(sats_path);

    McrpInstance inst;
    inst.grid = TimeGrid(T, opt.step_seconds, opt.stages);
    inst.gmst0 = deg2rad(kHarveyGmst0Deg);

    inst.satellites.resize(sats.size());
    for (std::size_t k = 0; k < sats.size(); ++k) {
        SatelliteSpec& sat = inst.satellites[k];
        sat.initial.semi_major_axis = kEarthRadius + sats[k].altitude_km;
        sat.initial.inclination = deg2rad(sats[k].inclination_deg);
        sat.initial.raan = detail::clamped_angle(sats[k].raan_deg);
        sat.initial.arg_lat_epoch = detail::clamped_angle(sats[k].arg_lat_deg);
        sat.initial.ref_time = 1;
        sat.c_max = sats[k].c_max_kms;
        sat.budget_constrained = true;
    }

    inst.targets.resize(track.size());
    std::vector<RewardWindow> spans;
    spans.reserve(track.size());
    int window = T / kHarveyTargetCount;
    for (int p = 0; p < kHarveyTargetCount; ++p) {
        inst.targets[p].lat = deg2rad(track[p].lat_deg_north);
        inst.targets[p].lon = deg2rad(-track[p].lon_deg_west); // file is west-positive
        inst.targets[p].min_elevation = deg2rad(kHarveyElevationDeg);
        spans.push_back({p, p * window + 1, (p + 1) * window,
                         static_cast<double>(track[p].reward)});
    }
    inst.rewards = RewardModel::windows(inst.grid, kHarveyTargetCount, std::move(spans));

    inst.slot_grid.mode = GridMode::PlaneAndPhase;
    inst.slot_grid.phase_count = opt.phase_count;
    inst.slot_grid.plane_steps_per_side = opt.plane_steps_per_side;
    inst.slot_grid.eta = 0.8;
    return inst;
}

// ---------------------------------------------------------------------------
// Report and plot data
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// A report that did not come from this instance is a caller bug; catch it
// before emitting numbers that silently compare apples to oranges.
inline void check_report_matches(const SolveReport& rep, const PreparedInstance& pi) {
    if (rep.plan.stages() == 0)
        throw InvalidInputError("report '" + rep.method + "' carries no plan");
    try {
        validate_plan(rep.plan, pi.graph);
    } catch (const Error& e) {
        throw InvalidInputError("report '" + rep.method +
                                "' was not produced on this instance: " + e.what());
    }
    if (objective(rep.plan, pi) != rep.objective)
        throw InvalidInputError("report '" + rep.method +
                                "' objective does not match its plan on this instance");
}

} // namespace detail

// Reward a plan earns inside each of `intervals` equal time windows. The
// window count must divide the horizon; the entries sum to the objective.
inline std::vector<double> interval_rewards(const ReconfigurationPlan& plan,
                                            const PreparedInstance& pi, int intervals) {
    const TimeGrid& grid = pi.instance.grid;
    if (intervals < 1 || grid.total_steps() % intervals != 0)
        throw InvalidInputError("interval rewards: " + std::to_string(intervals) +
                                " windows do not divide " +
                                std::to_string(grid.total_steps()) + " steps");
    CoverageStates y = coverage_states(plan, pi);
    int span = grid.total_steps() / intervals;
    std::vector<double> out(intervals, 0.0);
    for (int t = 1; t <= grid.total_steps(); ++t)
        for (int p = 0; p < pi.instance.rewards.targets(); ++p)
            if (y.covered(t, p)) out[(t - 1) / span] += pi.instance.rewards.reward(t, p);
    return out;
}

// Reward available in each window if every cell were covered; no plan can
// collect more.
inline std::vector<double> interval_reward_ceilings(const McrpInstance& inst, int intervals) {
    if (intervals < 1 || inst.grid.total_steps() % intervals != 0)
        throw InvalidInputError("interval rewards: " + std::to_string(intervals) +
                                " windows do not divide " +
                                std::to_string(inst.grid.total_steps()) + " steps");
    int span = inst.grid.total_steps() / intervals;
    std::vector<double> out(intervals, 0.0);
    for (int t = 1; t <= inst.grid.total_steps(); ++t)
        for (int p = 0; p < inst.rewards.targets(); ++p)
            out[(t - 1) / span] += inst.rewards.reward(t, p);
    return out;
}

// One row per method: objective, certified bound, gap and improvement
// percentages, runtime. Improvement is measured against the "baseline"
// report when one is present.
inline std::string method_summary_csv(const std::vector<SolveReport>& reports,
                                      const PreparedInstance& pi) {
    const SolveReport* baseline = nullptr;
    for (const SolveReport& rep : reports) {
        detail::check_report_matches(rep, pi);
        if (!baseline && rep.method == "baseline") baseline = &rep;
    }
    std::string out = "method,z,best_bound,dg_pct,runtime_s,improvement_pct\n";
    for (const SolveReport& rep : reports) {
        out += rep.method + ',' + detail::lp_number(rep.objective) + ',' +
               detail::lp_number(rep.best_bound) + ',';
        if (rep.duality_gap) out += detail::format_fixed(*rep.duality_gap * 100.0, 2);
        out += ',' + detail::format_fixed(rep.runtime_seconds, 3) + ',';
        if (baseline && baseline->objective != 0.0)
            out += detail::format_fixed(
                (rep.objective - baseline->objective) / baseline->objective * 100.0, 2);
        out += '\n';
    }
    return out;
}

// Long-form reward series: one row per (interval, method).
inline std::string interval_series_csv(const std::vector<SolveReport>& reports,
                                       const PreparedInstance& pi, int intervals) {
    std::string out = "interval,method,reward\n";
    for (const SolveReport& rep : reports) {
        detail::check_report_matches(rep, pi);
        std::vector<double> series = interval_rewards(rep.plan, pi, intervals);
        for (int i = 0; i < intervals; ++i)
            out += std::to_string(i + 1) + ',' + rep.method + ',' +
                   detail::lp_number(series[i]) + '\n';
    }
    return out;
}

} // namespace mcrp
