#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mcrp/orbit.hpp"
#include "mcrp/time_grid.hpp"

using namespace mcrp;

namespace {

// Independent two-body oracle: RK4-integrate the equations of motion from a
// circular-orbit state and report the time of the first return to the
// starting angle. Used to cross-check mean_motion without going through it.
double integrated_period(double a) {
    struct State {
        double x, y, vx, vy;
    };
    auto accel = [](double x, double y) {
        double r2 = x * x + y * y;
        double r = std::sqrt(r2);
        double f = -kMu / (r2 * r);
        return std::pair<double, double>{f * x, f * y};
    };
    auto deriv = [&](const State& s) {
        auto [ax, ay] = accel(s.x, s.y);
        return State{s.vx, s.vy, ax, ay};
    };
    auto step = [&](State s, double h) {
        State k1 = deriv(s);
        State k2 = deriv({s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y,
                          s.vx + 0.5 * h * k1.vx, s.vy + 0.5 * h * k1.vy});
        State k3 = deriv({s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y,
                          s.vx + 0.5 * h * k2.vx, s.vy + 0.5 * h * k2.vy});
        State k4 = deriv({s.x + h * k3.x, s.y + h * k3.y, s.vx + h * k3.vx, s.vy + h * k3.vy});
        return State{s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                     s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
                     s.vx + h / 6.0 * (k1.vx + 2 * k2.vx + 2 * k3.vx + k4.vx),
                     s.vy + h / 6.0 * (k1.vy + 2 * k2.vy + 2 * k3.vy + k4.vy)};
    };

    double v = std::sqrt(kMu / a);
    State s{a, 0.0, 0.0, v};
    double h = 0.25; // [s]
    double t = 0.0;
    // March until y crosses zero upward with x > 0 again (one revolution),
    // then interpolate the crossing inside the last step. The quadratic term
    // of y(t) vanishes at the crossing, so linear interpolation is plenty.
    for (int i = 0; i < 100'000; ++i) {
        State nxt = step(s, h);
        t += h;
        if (t > 10.0 && s.y < 0.0 && nxt.y >= 0.0 && nxt.x > 0.0) {
            double frac = -s.y / (nxt.y - s.y);
            return t - h + frac * h;
        }
        s = nxt;
    }
    return -1.0;
}

} // namespace

TEST_CASE("constants are positive and in expected units") {
    CHECK(kConstants.valid());
    CHECK(kMu == 398600.4418);
    CHECK(kEarthRadius == 6378.137);
    CHECK(kEarthRotationRate == 7.2921159e-5);
}

TEST_CASE("mean motion matches an independent orbit integration") {
    double a = 7378.137; // 1000 km altitude
    double n = mean_motion(a);
    // Frozen from the RK4 oracle below: one revolution takes 6307.12 s.
    CHECK_THAT(n, Catch::Matchers::WithinAbs(9.96205e-4, 5e-8));

    double period = integrated_period(a);
    REQUIRE(period > 0.0);
    CHECK_THAT(period, Catch::Matchers::WithinAbs(6307.12, 0.05));
    CHECK_THAT(kTwoPi / n, Catch::Matchers::WithinRel(period, 1e-6));
}

TEST_CASE("mean motion decreases monotonically with altitude") {
    double prev = mean_motion(kEarthRadius + 200.0);
    for (double alt = 400.0; alt <= 40000.0; alt += 400.0) {
        double n = mean_motion(kEarthRadius + alt);
        CHECK(n < prev);
        prev = n;
    }
    CHECK_THROWS_AS(mean_motion(kEarthRadius), InvalidInputError);
    CHECK_THROWS_AS(mean_motion(-1.0), InvalidInputError);
}

TEST_CASE("propagation is the identity at the reference step") {
    TimeGrid grid(100, 60.0, 4);
    OrbitalSlot s{7378.137, deg2rad(45.0), deg2rad(30.0), deg2rad(120.0), 7};
    auto st = propagate(s, 7, grid);
    CHECK(st.arg_lat == s.arg_lat_epoch);
    CHECK_THAT(norm(st.position), Catch::Matchers::WithinRel(s.semi_major_axis, 1e-12));
}

TEST_CASE("propagation returns to the start after one period") {
    double a = 7378.137;
    double period = kTwoPi / mean_motion(a); // 6307.12 s (cross-checked above)
    TimeGrid grid(10, period, 1);            // one step = one revolution
    OrbitalSlot s{a, deg2rad(51.6), 1.0, 0.0, 1};
    CHECK_THAT(wrap_pi(propagate_arg_lat(s, 2, grid)), Catch::Matchers::WithinAbs(0.0, 1e-9));
    // A slightly short step (period rounded down to 6307.0 s) leaves a phase
    // residual of n * 0.119 s ~= 1.19e-4 rad.
    TimeGrid coarse(10, 6307.0, 1);
    CHECK_THAT(wrap_pi(propagate_arg_lat(s, 2, coarse)),
               Catch::Matchers::WithinAbs(-1.19e-4, 2e-6));
}

TEST_CASE("propagated positions stay on the orbital sphere") {
    TimeGrid grid(4320, 100.0, 3);
    OrbitalSlot s{6978.137, deg2rad(97.0), deg2rad(250.0), deg2rad(10.0), 1};
    for (int t : {1, 17, 433, 2160, 4320}) {
        auto st = propagate(s, t, grid);
        CHECK_THAT(norm(st.position), Catch::Matchers::WithinRel(s.semi_major_axis, 1e-12));
        CHECK(st.arg_lat >= 0.0);
        CHECK(st.arg_lat < kTwoPi);
    }
    CHECK_THROWS_AS(propagate(s, 0, grid), RangeError);
    CHECK_THROWS_AS(propagate(s, 4321, grid), RangeError);
}

TEST_CASE("rebasing a slot preserves the physical orbit") {
    TimeGrid grid(600, 100.0, 2);
    OrbitalSlot s{7178.137, deg2rad(80.0), deg2rad(200.0), deg2rad(160.0), 1};
    OrbitalSlot r = rebase_slot(s, 301, grid);
    CHECK(r.ref_time == 301);
    for (int t : {301, 350, 600}) {
        auto a = propagate(s, t, grid);
        auto b = propagate(r, t, grid);
        CHECK_THAT(wrap_pi(a.arg_lat - b.arg_lat), Catch::Matchers::WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("walker pattern spreads planes evenly with aligned phases") {
    auto slots = walker_delta(5, deg2rad(80.0), 7378.137);
    REQUIRE(slots.size() == 5);
    double raan_sum = 0.0;
    for (int k = 0; k < 5; ++k) {
        CHECK_THAT(slots[k].raan, Catch::Matchers::WithinAbs(kTwoPi * k / 5.0, 1e-12));
        CHECK(slots[k].arg_lat_epoch == 0.0);
        CHECK(slots[k].inclination == deg2rad(80.0));
        raan_sum += slots[k].raan;
    }
    // Sum of 2*pi*k/K for k = 0..K-1 is pi*(K-1).
    CHECK_THAT(raan_sum, Catch::Matchers::WithinAbs(kPi * 4.0, 1e-12));

    auto one = walker_delta(1, deg2rad(53.0), 7000.0);
    CHECK(one.size() == 1);
    CHECK(one[0].raan == 0.0);
    CHECK_THROWS_AS(walker_delta(0, 1.0, 7000.0), InvalidInputError);
}

TEST_CASE("time grid stage arithmetic") {
    TimeGrid g(7344, 100.0, 8);
    CHECK(g.steps_per_stage() == 918);
    CHECK(g.stage_start(1) == 1);
    CHECK(g.stage_end(1) == 918);
    CHECK(g.stage_start(8) == 6427);
    CHECK(g.stage_end(8) == 7344);
    CHECK(g.stage_start(9) == 7345); // virtual end marker
    CHECK(g.stage_of(1) == 1);
    CHECK(g.stage_of(918) == 1);
    CHECK(g.stage_of(919) == 2);
    CHECK(g.stage_of(7344) == 8);
    CHECK_THROWS_AS(g.stage_of(0), RangeError);
    CHECK_THROWS_AS(g.stage_of(7345), RangeError);
    CHECK(g.seconds_between(1, 919) == 91800.0);
    CHECK(g.seconds_between(919, 1) == -91800.0);
}

TEST_CASE("time grid rejects stage counts that do not divide the horizon") {
    CHECK_THROWS_AS(TimeGrid(7344, 100.0, 5), InvalidInputError);
    CHECK_THROWS_WITH(TimeGrid(7344, 100.0, 5),
                      Catch::Matchers::ContainsSubstring("not divisible"));
    CHECK_THROWS_AS(TimeGrid(7344, 100.0, 7), InvalidInputError);
    CHECK_NOTHROW(TimeGrid(7344, 100.0, 6));
    CHECK_THROWS_AS(TimeGrid(0, 100.0, 1), InvalidInputError);
    CHECK_THROWS_AS(TimeGrid(10, -1.0, 1), InvalidInputError);
    CHECK_THROWS_AS(TimeGrid(10, 100.0, 0), InvalidInputError);
}
