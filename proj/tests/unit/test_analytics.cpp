#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dunesim/analytics.hpp"
#include "scenarios.hpp"

using namespace dunesim;

TEST_CASE("crest index") {
    const Grid g = Grid::make_1d(1.0, 9);
    CHECK_FALSE(crest_index(HeightField(g)).has_value());
    HeightField u(g);
    u(3) = 0.2;
    u(6) = 0.2;
    CHECK(*crest_index(u) == 3);  // leftmost tie-break
    const Grid g2 = Grid::make(2, {1.0, 1.0}, {5, 5});
    HeightField v(g2);
    v(4, 0) = 1.0;  // off the centerline
    v(1, 2) = 0.5;
    CHECK(*crest_index(v) == 1);
}

TEST_CASE("stationary run has zero speed") {
    const Grid g = Grid::make_1d(1.0, 32);
    ModelParams p = scenarios::sandpile_params();
    p.final_time = 0.1;
    HeightField u = dist_to_boundary(g);
    const CrestSeries c = crest_series(run(p, u));
    REQUIRE(c.speed_defined);
    CHECK(std::abs(c.speed) <= 1e-12);
}

TEST_CASE("synthetic translation by one cell per snapshot") {
    const Grid g = Grid::make_1d(1.0, 39);
    Trajectory t;
    t.grid = g;
    const double dt_snap = 0.125;
    for (int n = 0; n < 10; ++n) {
        HeightField u(g);
        for (int i = 0; i < g.nx(); ++i) u(i) = std::max(0.0, 0.1 - 0.5 * std::abs(i - (8 + n)) * g.dx());
        t.snapshots.push_back({n * dt_snap, u, MultiplierField(g)});
    }
    const CrestSeries c = crest_series(t);
    REQUIRE(c.speed_defined);
    CHECK(c.speed == doctest::Approx(g.dx() / dt_snap).epsilon(1e-12));
    CHECK(c.positions.front() == doctest::Approx(g.x(8)));
}

TEST_CASE("undefined crests are flagged") {
    const Grid g = Grid::make_1d(1.0, 9);
    Trajectory t;
    t.grid = g;
    for (int n = 0; n < 4; ++n) t.snapshots.push_back({n * 1.0, HeightField(g), MultiplierField(g)});
    const CrestSeries c = crest_series(t);
    for (bool d : c.defined) CHECK_FALSE(d);
    CHECK_FALSE(c.speed_defined);
}

TEST_CASE("wind-on dune moves downwind") {
    const Grid g = Grid::make_1d(1.0, 64);
    ModelParams p = scenarios::wind_params();
    p.final_time = scenarios::time_for_steps(g, p, 200);
    const CrestSeries c = crest_series(run(p, scenarios::asymmetric_dune(g)));
    REQUIRE(c.speed_defined);
    CHECK(c.speed > 0.0);
}

TEST_CASE("least squares slope") {
    CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(least_squares_slope({1.0}, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(least_squares_slope({1.0, 1.0}, {2.0, 3.0}), std::invalid_argument);
}
