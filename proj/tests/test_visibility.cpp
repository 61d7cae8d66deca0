#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <mcrp/visibility.hpp>

using namespace mcrp;
using Catch::Approx;

namespace {

// Largest central angle between subsatellite point and target at which the
// target still sees the satellite at elevation eps. Standard spherical horizon
// geometry, independent of the line-of-sight form used by the library.
double horizon_central_angle(double altitude, double eps) {
    return std::acos(kEarthRadius * std::cos(eps) / (kEarthRadius + altitude)) - eps;
}

double central_angle(const Vec3& a, const Vec3& b) {
    double c = dot(a, b) / (norm(a) * norm(b));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// Uniform in [0,1) from raw engine output; fixed mapping keeps the stream
// identical across platforms.
double unit_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

OrbitalSlot equatorial_slot(double altitude, double u0) {
    OrbitalSlot s;
    s.semi_major_axis = kEarthRadius + altitude;
    s.inclination = 0.0;
    s.raan = 0.0;
    s.arg_lat_epoch = u0;
    s.ref_time = 1;
    return s;
}

} // namespace

TEST_CASE("elevation geometry against closed-form horizon angle") {
    const double h = 1000.0;
    const double a = kEarthRadius + h;

    SECTION("satellite at zenith") {
        Vec3 sat{a, 0.0, 0.0};
        Vec3 tgt{kEarthRadius, 0.0, 0.0};
        REQUIRE(elevation_from_positions(sat, tgt) == Approx(kPi / 2.0).margin(1e-9));
    }

    SECTION("elevation at the mask-limited horizon equals the mask") {
        for (double eps_deg : {0.0, 5.0, 10.0, 25.0}) {
            double eps = deg2rad(eps_deg);
            double psi = horizon_central_angle(h, eps);
            Vec3 sat{a * std::cos(psi), a * std::sin(psi), 0.0};
            Vec3 tgt{kEarthRadius, 0.0, 0.0};
            REQUIRE(elevation_from_positions(sat, tgt) == Approx(eps).margin(1e-9));
        }
    }

    SECTION("bisection on elevation reproduces the closed form") {
        // frozen: psi_max(1000 km, 5 deg) = 25.551244 deg, (1000 km, 10 deg) = 21.643237 deg
        for (auto [eps_deg, frozen_deg] : {std::pair{5.0, 25.551244}, {10.0, 21.643237}}) {
            double eps = deg2rad(eps_deg);
            double lo = 0.0, hi = kPi / 2.0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                Vec3 sat{a * std::cos(mid), a * std::sin(mid), 0.0};
                if (elevation_from_positions(sat, {kEarthRadius, 0.0, 0.0}) >= eps)
                    lo = mid;
                else
                    hi = mid;
            }
            double closed = horizon_central_angle(h, eps);
            REQUIRE(lo == Approx(closed).margin(1e-10));
            REQUIRE(rad2deg(closed) == Approx(frozen_deg).margin(5e-6));
        }
    }

    SECTION("elevation decreases with central angle") {
        double prev = kPi;
        for (int i = 0; i <= 40; ++i) {
            double psi = i * (deg2rad(40.0) / 40.0);
            Vec3 sat{a * std::cos(psi), a * std::sin(psi), 0.0};
            double el = elevation_from_positions(sat, {kEarthRadius, 0.0, 0.0});
            REQUIRE(el < prev);
            prev = el;
        }
    }
}

TEST_CASE("target motion follows Earth rotation") {
    TimeGrid grid(100, 60.0, 4);
    GroundTarget tgt{deg2rad(30.0), deg2rad(45.0), deg2rad(5.0)};

    SECTION("targets stay on the surface sphere") {
        for (int t : {1, 17, 100}) {
            Vec3 p = target_position(tgt, t, grid, 1.234);
            REQUIRE(norm(p) == Approx(kEarthRadius).epsilon(1e-12));
        }
    }

    SECTION("one sidereal-rate step advances inertial longitude by w_E dt") {
        Vec3 p1 = target_position(tgt, 10, grid);
        Vec3 p2 = target_position(tgt, 11, grid);
        double swept = central_angle(p1, p2);
        double dlon = kEarthRotationRate * 60.0;
        double sl = std::sin(tgt.lat), cl = std::cos(tgt.lat);
        double expected = std::acos(sl * sl + cl * cl * std::cos(dlon));
        REQUIRE(swept == Approx(expected).epsilon(1e-9));
    }

    SECTION("latitude is invariant under rotation") {
        Vec3 p = target_position(tgt, 55, grid, 0.77);
        REQUIRE(std::asin(p.z / norm(p)) == Approx(tgt.lat).epsilon(1e-12));
    }

    SECTION("step outside the grid is rejected") {
        REQUIRE_THROWS_AS(target_position(tgt, 0, grid), RangeError);
        REQUIRE_THROWS_AS(target_position(tgt, 101, grid), RangeError);
    }

    SECTION("bad targets are rejected") {
        REQUIRE_THROWS_AS(validate_target({deg2rad(95.0), 0.0, 0.1}), InvalidInputError);
        REQUIRE_THROWS_AS(validate_target({0.0, 0.0, -0.1}), InvalidInputError);
        REQUIRE_THROWS_AS(validate_target({0.0, 0.0, kPi / 2.0}), InvalidInputError);
    }
}

TEST_CASE("visibility tensor layout and bounds") {
    TimeGrid grid(40, 30.0, 2);
    // 5 targets x 20 steps per stage = 100 bits per slot, so each slot spans
    // two words and block alignment actually matters.
    VisibilityTensor vt(grid, {{3, 2}, {1, 4}}, 5);

    REQUIRE(vt.stages() == 2);
    REQUIRE(vt.satellites() == 2);
    REQUIRE(vt.targets() == 5);
    REQUIRE(vt.slot_count(1, 1) == 3);
    REQUIRE(vt.slot_count(2, 1) == 2);
    REQUIRE(vt.slot_count(1, 2) == 1);
    REQUIRE(vt.slot_count(2, 2) == 4);
    REQUIRE(vt.words_per_slot() == 2);

    SECTION("set/get round trip including clears") {
        REQUIRE_FALSE(vt.get(2, 1, 1, 4, 33));
        vt.set(2, 1, 1, 4, 33);
        REQUIRE(vt.get(2, 1, 1, 4, 33));
        REQUIRE(vt.set_bit_count() == 1);
        vt.set(2, 1, 1, 4, 33, false);
        REQUIRE(vt.set_bit_count() == 0);
    }

    SECTION("neighbouring bits stay untouched") {
        vt.set(1, 2, 0, 2, 7);
        for (int p = 0; p < 5; ++p)
            for (int t = 1; t <= 20; ++t)
                REQUIRE(vt.get(1, 2, 0, p, t) == (p == 2 && t == 7));
    }

    SECTION("index violations throw") {
        REQUIRE_THROWS_AS(vt.get(0, 1, 0, 0, 1), RangeError);
        REQUIRE_THROWS_AS(vt.get(3, 1, 0, 0, 1), RangeError);
        REQUIRE_THROWS_AS(vt.get(1, 3, 0, 0, 1), RangeError);
        REQUIRE_THROWS_AS(vt.get(1, 1, 3, 0, 1), RangeError);
        REQUIRE_THROWS_AS(vt.get(1, 1, 0, 5, 1), RangeError);
        // step 25 belongs to stage 2, not stage 1
        REQUIRE_THROWS_AS(vt.get(1, 1, 0, 0, 25), RangeError);
        REQUIRE_THROWS_AS(vt.get(2, 1, 0, 0, 20), RangeError);
    }

    SECTION("constructor rejects malformed shapes") {
        REQUIRE_THROWS_AS(VisibilityTensor(grid, {{3}, {1, 4}}, 5), InvalidInputError);
        REQUIRE_THROWS_AS(VisibilityTensor(grid, {{3, -1}, {1, 4}}, 5), InvalidInputError);
        REQUIRE_THROWS_AS(VisibilityTensor(grid, {{3, 2}}, -1), InvalidInputError);
    }
}

TEST_CASE("computed tensor matches an independent central-angle oracle") {
    // Random circular orbits and targets; the oracle declares a bit set when
    // the subsatellite-to-target central angle is inside the mask-limited
    // horizon cone. That derivation never touches elevation_from_positions.
    std::mt19937_64 eng(20170823);
    TimeGrid grid(60, 120.0, 3);

    std::vector<std::vector<std::vector<OrbitalSlot>>> slots(2);
    for (int k = 0; k < 2; ++k) {
        slots[k].resize(3);
        for (int s = 0; s < 3; ++s) {
            int count = 1 + static_cast<int>(unit_uniform(eng) * 3.0);
            for (int j = 0; j < count; ++j) {
                OrbitalSlot sl;
                sl.semi_major_axis = kEarthRadius + 700.0 + 900.0 * unit_uniform(eng);
                sl.inclination = deg2rad(10.0 + 150.0 * unit_uniform(eng));
                sl.raan = kTwoPi * unit_uniform(eng);
                sl.arg_lat_epoch = kTwoPi * unit_uniform(eng);
                sl.ref_time = 1;
                slots[k][s].push_back(sl);
            }
        }
    }
    std::vector<GroundTarget> targets;
    for (int p = 0; p < 4; ++p)
        targets.push_back({(unit_uniform(eng) - 0.5) * kPi * 0.9,
                           (unit_uniform(eng) - 0.5) * kTwoPi,
                           deg2rad(2.0 + 20.0 * unit_uniform(eng))});

    const double gmst0 = 0.81;
    VisibilityTensor vt = compute_visibility(slots, targets, grid, gmst0);

    std::size_t checked = 0, set_bits = 0;
    for (int s = 1; s <= 3; ++s)
        for (int k = 1; k <= 2; ++k)
            for (int j = 0; j < vt.slot_count(s, k); ++j) {
                const OrbitalSlot& sl = slots[k - 1][s - 1][j];
                double psi_max =
                    horizon_central_angle(sl.semi_major_axis - kEarthRadius, 0.0);
                for (int p = 0; p < 4; ++p) {
                    double cone = horizon_central_angle(sl.semi_major_axis - kEarthRadius,
                                                        targets[p].min_elevation);
                    REQUIRE(cone < psi_max);
                    for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t) {
                        Vec3 sat = propagate(sl, t, grid).position;
                        Vec3 tgt = target_position(targets[p], t, grid, gmst0);
                        bool oracle = central_angle(sat, tgt) <= cone;
                        REQUIRE(vt.get(s, k, j, p, t) == oracle);
                        ++checked;
                        set_bits += oracle;
                    }
                }
            }
    REQUIRE(checked >= 4u * 20u * 6u);
    REQUIRE(set_bits > 0);
}

TEST_CASE("tightening the elevation mask never adds visibility") {
    TimeGrid grid(80, 60.0, 2);
    std::vector<std::vector<std::vector<OrbitalSlot>>> slots = {
        {{equatorial_slot(800.0, 0.0), equatorial_slot(1400.0, 1.0)},
         {equatorial_slot(800.0, 0.0)}}};
    std::vector<GroundTarget> loose = {{0.1, 0.3, deg2rad(5.0)}, {-0.4, 2.0, deg2rad(5.0)}};
    std::vector<GroundTarget> tight = loose;
    for (auto& g : tight) g.min_elevation = deg2rad(10.0);

    VisibilityTensor a = compute_visibility(slots, loose, grid);
    VisibilityTensor b = compute_visibility(slots, tight, grid);

    std::size_t lost = 0;
    for (int s = 1; s <= 2; ++s)
        for (int j = 0; j < a.slot_count(s, 1); ++j)
            for (int p = 0; p < 2; ++p)
                for (int t = grid.stage_start(s); t <= grid.stage_end(s); ++t) {
                    if (b.get(s, 1, j, p, t)) REQUIRE(a.get(s, 1, j, p, t));
                    lost += a.get(s, 1, j, p, t) && !b.get(s, 1, j, p, t);
                }
    REQUIRE(b.set_bit_count() <= a.set_bit_count());
    REQUIRE(lost > 0);
}

TEST_CASE("equatorial pass length matches relative-rate prediction") {
    // Satellite and target both on the equator; the pass duration is the
    // horizon cone width divided by the satellite-minus-Earth angular rate.
    const double h = 1000.0;
    const double dt = 10.0;
    TimeGrid grid(200, dt, 1);
    double n = mean_motion(kEarthRadius + h);
    double rel_rate = n - kEarthRotationRate;
    double psi = horizon_central_angle(h, deg2rad(5.0));

    // Start the satellite just outside the cone, closing in.
    GroundTarget tgt{0.0, 0.05 + psi + kEarthRotationRate * dt, deg2rad(5.0)};
    std::vector<std::vector<std::vector<OrbitalSlot>>> slots = {{{equatorial_slot(h, 0.0)}}};
    VisibilityTensor vt = compute_visibility(slots, {tgt}, grid);

    int first = 0, last = 0, count = 0;
    for (int t = 1; t <= 200; ++t)
        if (vt.get(1, 1, 0, 0, t)) {
            if (count == 0) first = t;
            last = t;
            ++count;
        }
    double expected = 2.0 * psi / (rel_rate * dt);
    REQUIRE(count > 0);
    REQUIRE(std::abs(count - expected) <= 1.0);
    REQUIRE(last - first + 1 == count); // single contiguous pass
    REQUIRE(first > 1);
    REQUIRE(last < 200);
}

TEST_CASE("rotating the frame origin with counter-shifted targets is exact") {
    // Dyadic shift so (lon - delta) + (gmst0 + delta) reassociates without
    // rounding; the two tensors must agree bit for bit.
    const double delta = 0.25;
    TimeGrid grid(60, 45.0, 3);
    std::vector<std::vector<std::vector<OrbitalSlot>>> slots(1);
    slots[0].resize(3);
    for (int s = 0; s < 3; ++s)
        for (int j = 0; j < 2; ++j) {
            OrbitalSlot sl;
            sl.semi_major_axis = kEarthRadius + 900.0 + 50.0 * j;
            sl.inclination = deg2rad(50.0);
            sl.raan = 0.5 * j;
            sl.arg_lat_epoch = 0.25 * s;
            slots[0][s].push_back(sl);
        }
    std::vector<GroundTarget> base = {{0.25, 0.5, deg2rad(5.0)},
                                      {-0.5, 1.0, deg2rad(8.0)},
                                      {0.0, -0.75, deg2rad(5.0)}};
    std::vector<GroundTarget> shifted = base;
    for (auto& g : shifted) g.lon -= delta;

    VisibilityTensor a = compute_visibility(slots, base, grid, 0.0);
    VisibilityTensor b = compute_visibility(slots, shifted, grid, delta);
    REQUIRE(a.same_bits(b));
    REQUIRE(a.set_bit_count() > 0);
}

TEST_CASE("worker count does not change the tensor") {
    std::mt19937_64 eng(42);
    TimeGrid grid(48, 90.0, 4);
    std::vector<std::vector<std::vector<OrbitalSlot>>> slots(3);
    for (int k = 0; k < 3; ++k) {
        slots[k].resize(4);
        for (int s = 0; s < 4; ++s)
            for (int j = 0; j < 2 + (k + s) % 2; ++j) {
                OrbitalSlot sl;
                sl.semi_major_axis = kEarthRadius + 700.0 + 600.0 * unit_uniform(eng);
                sl.inclination = deg2rad(20.0 + 120.0 * unit_uniform(eng));
                sl.raan = kTwoPi * unit_uniform(eng);
                sl.arg_lat_epoch = kTwoPi * unit_uniform(eng);
                slots[k][s].push_back(sl);
            }
    }
    std::vector<GroundTarget> targets = {{0.3, 1.0, deg2rad(5.0)},
                                         {-0.2, -2.0, deg2rad(12.0)},
                                         {1.1, 0.4, deg2rad(5.0)}};
    VisibilityTensor one = compute_visibility(slots, targets, grid, 0.3, 1);
    VisibilityTensor four = compute_visibility(slots, targets, grid, 0.3, 4);
    VisibilityTensor nine = compute_visibility(slots, targets, grid, 0.3, 9);
    REQUIRE(one.same_bits(four));
    REQUIRE(one.same_bits(nine));
    REQUIRE(one.set_bit_count() > 0);
}
