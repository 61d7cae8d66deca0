#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include <mcrp/scenario.hpp>
#include <mcrp/serialization.hpp>
#include <mcrp/solvers.hpp>

#include "fixtures.hpp"

using namespace mcrp;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        lines.push_back(text.substr(start, end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        fields.push_back(line.substr(start, end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return fields;
}

bool same_instance(const McrpInstance& a, const McrpInstance& b) {
    return a.grid == b.grid && a.satellites == b.satellites && a.targets == b.targets &&
           a.rewards == b.rewards && a.slot_grid == b.slot_grid && a.gmst0 == b.gmst0 &&
           a.core.has_value() == b.core.has_value();
}

} // namespace

TEST_CASE("default random recipe reproduces the published plan count") {
    InstanceRecipe recipe;
    recipe.seed = 7;
    McrpInstance inst = generate_random_instance(recipe);
    validate_instance(inst);

    REQUIRE(inst.grid == TimeGrid(4320, 100.0, 3));
    REQUIRE(inst.satellites.size() == 3);
    REQUIRE(inst.targets.size() == 10);
    for (const SatelliteSpec& sat : inst.satellites) {
        REQUIRE(sat.c_max == 0.6);
        REQUIRE(sat.budget_constrained);
        REQUIRE(sat.initial.inclination == deg2rad(80.0));
        REQUIRE(sat.initial.semi_major_axis == inst.satellites[0].initial.semi_major_axis);
    }
    REQUIRE(inst.satellites[0].initial.raan == 0.0);
    REQUIRE(inst.satellites[1].initial.raan == deg2rad(120.0));
    REQUIRE(inst.satellites[2].initial.raan == deg2rad(240.0));

    ReconfigurationGraph graph = build_instance_graph(inst);
    REQUIRE(graph.plan_count() == 1.953125e15); // 50^9
}

TEST_CASE("instance generation is a pure function of the seed") {
    InstanceRecipe recipe;
    recipe.seed = 42;
    McrpInstance a = generate_random_instance(recipe);
    McrpInstance b = generate_random_instance(recipe);
    REQUIRE(same_instance(a, b));
    REQUIRE(serialize_instance(a) == serialize_instance(b));

    recipe.seed = 43;
    McrpInstance c = generate_random_instance(recipe);
    REQUIRE(c.satellites[0].initial.semi_major_axis != a.satellites[0].initial.semi_major_axis);
    REQUIRE(serialize_instance(c) != serialize_instance(a));

    REQUIRE(same_instance(generate_micro_instance(7), generate_micro_instance(7)));
    REQUIRE_FALSE(same_instance(generate_micro_instance(7), generate_micro_instance(8)));
}

TEST_CASE("dynamic family pays each target exactly during its assigned stage") {
    InstanceRecipe recipe;
    recipe.family = InstanceFamily::Dynamic;
    recipe.seed = 5;
    McrpInstance inst = generate_random_instance(recipe);
    validate_instance(inst);

    int T = inst.grid.total_steps();
    int N = inst.grid.stages();
    for (int p = 0; p < inst.rewards.targets(); ++p) {
        int stage = p % N + 1;
        int nonzero = 0;
        for (int t = 1; t <= T; ++t) {
            double r = inst.rewards.reward(t, p);
            if (r != 0.0) {
                REQUIRE(r == 1.0);
                REQUIRE(inst.grid.stage_of(t) == stage);
                ++nonzero;
            }
        }
        REQUIRE(nonzero == T / N);
    }
}

TEST_CASE("micro instances stay inside the enumeration envelope") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        CAPTURE(seed);
        McrpInstance inst = generate_micro_instance(seed);
        validate_instance(inst);
        REQUIRE(inst.satellites.size() <= 2);
        REQUIRE(inst.grid.stages() <= 3);
        REQUIRE(inst.grid.steps_per_stage() <= 8);
        REQUIRE(inst.targets.size() <= 3);
        REQUIRE(inst.slot_grid.mode == GridMode::PhaseOnly);
        REQUIRE(inst.slot_grid.phase_count >= 2);
        REQUIRE(inst.slot_grid.phase_count <= 6);
        double plans = 1.0;
        for (std::size_t e = 0; e < inst.satellites.size() * inst.grid.stages(); ++e)
            plans *= inst.slot_grid.phase_count;
        REQUIRE(plans <= 30000.0);
        for (const SatelliteSpec& sat : inst.satellites) {
            REQUIRE(sat.c_max > 0.0);
            REQUIRE(sat.c_max <= 0.4);
        }
    }
}

TEST_CASE("storm track file loads with category-consistent rewards") {
    std::vector<HarveyTrackRecord> track = load_harvey_track(harvey_track_path());
    REQUIRE(track.size() == 17);
    REQUIRE(track[0] ==
            HarveyTrackRecord{"08/23/2017 12:00", 21.40, 92.30, "Tropical Depression", 1});
    REQUIRE(track[5].category == "Category 3+ Major Hurricane");
    REQUIRE(track[5].reward == 4);
    REQUIRE(track[9] == HarveyTrackRecord{"08/28/2017 00:00", 28.80, 96.80, "Tropical Storm", 2});
    REQUIRE(track[16].reward == 1);

    std::vector<HarveySatelliteRecord> sats = load_harvey_satellites(harvey_satellites_path());
    REQUIRE(sats.size() == 4);
    REQUIRE(sats[1] == HarveySatelliteRecord{991.14, 65.87, 132.15, 210.76, 1.079});
}

TEST_CASE("track loader rejects malformed files") {
    const std::string good = read_text_file(harvey_track_path());
    auto with_content = [](const std::string& text) {
        std::string path = "/tmp/mcrp_track_case.csv";
        write_text_file(path, text);
        return path;
    };

    SECTION("wrong header") {
        std::string bad = "time,lat,lon,cat,reward\n" + good.substr(good.find('\n') + 1);
        REQUIRE_THROWS_MATCHES(load_harvey_track(with_content(bad)), ParseError,
                               Catch::Matchers::MessageMatches(
                                   ContainsSubstring("unexpected header")));
    }
    SECTION("missing a record") {
        std::string bad = good.substr(0, good.rfind("08/31/2017 12:00"));
        REQUIRE_THROWS_MATCHES(
            load_harvey_track(with_content(bad)), ParseError,
            Catch::Matchers::MessageMatches(ContainsSubstring("expected 17")));
    }
    SECTION("unparseable number carries its row") {
        std::string bad = good;
        bad.replace(bad.find("22.00"), 5, "south");
        REQUIRE_THROWS_MATCHES(load_harvey_track(with_content(bad)), ParseError,
                               Catch::Matchers::MessageMatches(
                                   ContainsSubstring("row 3: bad number 'south'")));
    }
    SECTION("reward out of step with the category") {
        std::string bad = good;
        bad.replace(bad.find("Tropical Depression,1"), 21, "Tropical Depression,2");
        REQUIRE_THROWS_MATCHES(
            load_harvey_track(with_content(bad)), ParseError,
            Catch::Matchers::MessageMatches(ContainsSubstring("does not match category")));
    }
    SECTION("unknown category") {
        std::string bad = good;
        bad.replace(bad.find("Tropical Depression"), 19, "Subtropical Breeze!");
        REQUIRE_THROWS_MATCHES(
            load_harvey_track(with_content(bad)), ParseError,
            Catch::Matchers::MessageMatches(ContainsSubstring("unknown storm category")));
    }
    SECTION("field count") {
        std::string bad = good + "extra,row\n";
        REQUIRE_THROWS_MATCHES(
            load_harvey_track(with_content(bad)), ParseError,
            Catch::Matchers::MessageMatches(ContainsSubstring("expected 5 fields")));
    }
}

TEST_CASE("case-study instance wires the track into rewards and geometry") {
    McrpInstance inst = make_harvey_instance(harvey_track_path(), harvey_satellites_path());
    validate_instance(inst);

    REQUIRE(inst.grid == TimeGrid(7344, 100.0, 8));
    REQUIRE(inst.targets.size() == 17);
    REQUIRE(inst.satellites.size() == 4);
    REQUIRE(inst.gmst0 == deg2rad(kHarveyGmst0Deg));
    REQUIRE(inst.slot_grid.mode == GridMode::PlaneAndPhase);
    REQUIRE(inst.slot_grid.phase_count == 24);
    REQUIRE(inst.slot_grid.plane_steps_per_side == 4);
    REQUIRE(slots_per_stage(inst.slot_grid) == 408); // 17 planes x 24 phases

    REQUIRE(inst.satellites[1].initial.inclination == deg2rad(65.87));
    REQUIRE(inst.satellites[1].c_max == 1.079);
    for (const SatelliteSpec& sat : inst.satellites) REQUIRE(sat.budget_constrained);

    // west-positive track longitudes become east-positive coordinates
    REQUIRE(inst.targets[0].lat == deg2rad(21.40));
    REQUIRE(inst.targets[0].lon == deg2rad(-92.30));
    REQUIRE(inst.targets[0].min_elevation == deg2rad(10.0));

    // each position pays only inside its 12-hour window, at category weight
    REQUIRE(inst.rewards.reward(1, 0) == 1.0);
    REQUIRE(inst.rewards.reward(432, 0) == 1.0);
    REQUIRE(inst.rewards.reward(433, 0) == 0.0);
    REQUIRE(inst.rewards.reward(433, 1) == 2.0);
    REQUIRE(inst.rewards.reward(2161, 5) == 4.0);
    REQUIRE(inst.rewards.reward(2592, 5) == 4.0);
    REQUIRE(inst.rewards.reward(3889, 9) == 2.0);
    REQUIRE(inst.rewards.reward(4320, 9) == 2.0);
    REQUIRE(inst.rewards.reward(7344, 16) == 1.0);
}

TEST_CASE("case-study grid arithmetic is validated up front") {
    auto build = [](HarveyOptions opt) {
        return make_harvey_instance(harvey_track_path(), harvey_satellites_path(), opt);
    };
    REQUIRE_THROWS_MATCHES(build({.stages = 5}), InvalidInputError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("equal stages")));
    REQUIRE_THROWS_MATCHES(build({.stages = 7}), InvalidInputError,
                           Catch::Matchers::MessageMatches(ContainsSubstring("equal stages")));
    REQUIRE_THROWS_MATCHES(build({.stages = 8, .step_seconds = 7.0}), InvalidInputError,
                           Catch::Matchers::MessageMatches(
                               ContainsSubstring("not a whole number")));
    REQUIRE_THROWS_MATCHES(build({.stages = 2, .step_seconds = 544.0}), InvalidInputError,
                           Catch::Matchers::MessageMatches(
                               ContainsSubstring("twelve-hour target windows")));

    // desk-scale coarsening stays legal
    McrpInstance reduced = build({.stages = 2, .step_seconds = 300.0});
    REQUIRE(reduced.grid == TimeGrid(2448, 300.0, 2));
}

TEST_CASE("available reward per interval matches the case-study profile") {
    McrpInstance inst = make_harvey_instance(harvey_track_path(), harvey_satellites_path());
    std::vector<double> full{1404.0, 2376.0, 3186.0, 2106.0, 1836.0, 1836.0, 1836.0, 1404.0};
    REQUIRE(interval_reward_ceilings(inst, 8) == full);

    McrpInstance reduced = make_harvey_instance(harvey_track_path(), harvey_satellites_path(),
                                                {.stages = 8, .step_seconds = 300.0});
    std::vector<double> third{468.0, 792.0, 1062.0, 702.0, 612.0, 612.0, 612.0, 468.0};
    REQUIRE(interval_reward_ceilings(reduced, 8) == third);

    REQUIRE_THROWS_AS(interval_reward_ceilings(inst, 7), InvalidInputError);
}

TEST_CASE("per-interval plan rewards split the objective") {
    PreparedInstance pi = prepare_instance(fixtures::budget_trap_instance());
    SolveReport ex = solve_exact_bnb(pi);

    REQUIRE(interval_rewards(ex.plan, pi, 1) == std::vector<double>{15.0});
    REQUIRE(interval_rewards(ex.plan, pi, 2) == std::vector<double>{5.0, 10.0});
    REQUIRE_THROWS_AS(interval_rewards(ex.plan, pi, 3), InvalidInputError);

    for (std::uint64_t seed : {9u, 21u}) {
        CAPTURE(seed);
        PreparedInstance mpi = prepare_instance(generate_micro_instance(seed));
        SolveReport rep = solve_mp(mpi);
        std::vector<double> series =
            interval_rewards(rep.plan, mpi, mpi.instance.grid.total_steps());
        double sum = 0.0;
        for (double v : series) sum += v;
        REQUIRE(sum == rep.objective);
    }
}

TEST_CASE("method summary table") {
    PreparedInstance pi = prepare_instance(fixtures::budget_trap_instance());
    std::vector<SolveReport> reports{solve_baseline(pi), solve_mp(pi), solve_exact_bnb(pi)};

    std::vector<std::string> lines = csv_lines(method_summary_csv(reports, pi));
    REQUIRE(lines.size() == 4);
    REQUIRE(lines[0] == "method,z,best_bound,dg_pct,runtime_s,improvement_pct");

    std::vector<std::string> base = csv_fields(lines[1]);
    REQUIRE(base[0] == "baseline");
    REQUIRE(base[1] == "5");
    REQUIRE(base[2] == "16");
    REQUIRE(base[3] == "220.00");
    REQUIRE(base[5] == "0.00");

    std::vector<std::string> mp = csv_fields(lines[2]);
    REQUIRE(mp[0] == "mp");
    REQUIRE(mp[1] == "6");
    REQUIRE(mp[3] == "166.67");
    REQUIRE(mp[5] == "20.00");

    std::vector<std::string> ex = csv_fields(lines[3]);
    REQUIRE(ex[0] == "exact");
    REQUIRE(ex[1] == "15");
    REQUIRE(ex[2] == "15");
    REQUIRE(ex[3] == "0.00");
    REQUIRE(ex[5] == "200.00");

    SECTION("gap and improvement go blank at zero denominators") {
        McrpInstance zero = fixtures::budget_trap_instance();
        zero.rewards = RewardModel::dense(zero.grid, 3, std::vector<double>(6, 0.0));
        PreparedInstance zpi = prepare_instance(zero);
        std::vector<SolveReport> zreports{solve_baseline(zpi), solve_exact_bnb(zpi)};
        std::vector<std::string> zlines = csv_lines(method_summary_csv(zreports, zpi));
        std::vector<std::string> zex = csv_fields(zlines[2]);
        REQUIRE(zex[1] == "0");
        REQUIRE(zex[3].empty());
        REQUIRE(zex[5].empty());
    }

    SECTION("improvement is blank without a baseline report") {
        std::vector<SolveReport> solo{solve_exact_bnb(pi)};
        std::vector<std::string> slines = csv_lines(method_summary_csv(solo, pi));
        REQUIRE(csv_fields(slines[1])[5].empty());
    }

    SECTION("reports from another instance are refused") {
        SolveReport tampered = solve_exact_bnb(pi);
        tampered.objective += 1.0;
        REQUIRE_THROWS_AS(method_summary_csv({tampered}, pi), InvalidInputError);

        SolveReport empty;
        empty.method = "exact";
        REQUIRE_THROWS_AS(method_summary_csv({empty}, pi), InvalidInputError);

        SolveReport foreign = solve_exact_bnb(pi);
        foreign.plan.assignment[0].push_back(0);
        REQUIRE_THROWS_AS(method_summary_csv({foreign}, pi), InvalidInputError);
    }
}

TEST_CASE("interval reward series in long form") {
    PreparedInstance pi = prepare_instance(fixtures::budget_trap_instance());
    std::vector<SolveReport> reports{solve_exact_bnb(pi), solve_mp(pi)};
    std::string csv = interval_series_csv(reports, pi, 2);
    REQUIRE(csv ==
            "interval,method,reward\n"
            "1,exact,5\n"
            "2,exact,10\n"
            "1,mp,6\n"
            "2,mp,0\n");
}
