#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dunesim/analytics.hpp"
#include "dunesim/nonlocal.hpp"
#include "dunesim/stepper.hpp"
#include "scenarios.hpp"

using namespace dunesim;

TEST_CASE("transport flux") {
    const Grid g = Grid::make_1d(1.0, 63);
    ModelParams p = scenarios::wind_params();
    SUBCASE("zero height gives zero flux") {
        for (double f : transport_flux(HeightField(g), p).values) CHECK(f == 0.0);
    }
    SUBCASE("H = zero gives zero flux") {
        p.h = HProfile::zero();
        for (double f : transport_flux(scenarios::asymmetric_dune(g), p).values) CHECK(f == 0.0);
    }
    SUBCASE("flux only where the nonlocal slope is positive") {
        p.h = HProfile::smooth_ramp();
        p.gamma = GammaProfile::identity();
        HeightField u(g);
        for (int i = 0; i < g.nx(); ++i) u(i) = std::max(0.0, 0.2 - std::abs(g.x(i) - 0.5));
        const HeightField f = transport_flux(u, p);
        const HeightField s = nonlocal_slope(u, build_kernel(p.kernel.profile, p.kernel.radius, g.dx()));
        int windward = 0;
        for (int i = 0; i < g.nx(); ++i) {
            if (s(i) > 0.0 && u(i) > 0.0) {
                CHECK(f(i) > 0.0);
                ++windward;
            } else {
                CHECK(f(i) == 0.0);
            }
        }
        CHECK(windward > 0);
    }
}

TEST_CASE("upwind divergence") {
    const Grid g = Grid::make_1d(1.0, 9);
    HeightField f(g);
    for (double v : transport_div(f).values) CHECK(v == 0.0);
    SUBCASE("constant flux") {
        HeightField c(g, 0.4);
        const HeightField d = transport_div(c);
        for (int i = 1; i < g.nx(); ++i) CHECK(d(i) == 0.0);
    }
    SUBCASE("single flux cell telescopes") {
        f(4) = 0.3;
        const HeightField d = transport_div(f);
        CHECK(d(4) == doctest::Approx(0.3 / g.dx()));
        CHECK(d(5) == doctest::Approx(-0.3 / g.dx()));
        double s = 0.0;
        for (double v : d.values) s += v;
        CHECK(std::abs(s) <= 1e-12);
    }
}

TEST_CASE("CFL step") {
    const Grid g = Grid::make_1d(1.1, 10);  // dx = 0.1
    ModelParams p;
    p.kernel.radius = 0.2;
    p.h = HProfile::zero();
    CHECK(cfl_dt(g, p) == p.dt_max);
    p.h = HProfile::constant(1.0);
    p.gamma = GammaProfile::identity();
    CHECK(cfl_dt(g, p) == doctest::Approx(0.045).epsilon(1e-12));
    const Grid fine = Grid::make_1d(1.05, 20);  // dx = 0.05
    CHECK(cfl_dt(fine, p) == doctest::Approx(0.5 * cfl_dt(g, p)).epsilon(1e-12));
    const ModelParams w = scenarios::wind_params();
    const double dt = cfl_dt(g, w);
    CHECK_THROWS_AS(step(HeightField(g), 0.0, 2.0 * dt, w), std::invalid_argument);
}

TEST_CASE("stationary sandpile step") {
    const Grid g = Grid::make_1d(1.0, 31);
    const ModelParams p = scenarios::sandpile_params();
    HeightField u = dist_to_boundary(g);
    for (double& v : u.values) v *= 0.6;
    CHECK(step(u, 0.0, 0.01, p).u.values == u.values);
    CHECK(step(HeightField(g), 0.0, 1e-3, scenarios::wind_params()).u.values == HeightField(g).values);
}

TEST_CASE("run edge cases") {
    const Grid g = Grid::make_1d(1.0, 31);
    HeightField u = dist_to_boundary(g);
    for (double& v : u.values) v *= 0.6;
    SUBCASE("zero final time") {
        ModelParams p = scenarios::wind_params();
        p.final_time = 0.0;
        const Trajectory t = run(p, u);
        REQUIRE(t.snapshots.size() == 1);
        CHECK(t.snapshots[0].u.values == u.values);
        CHECK(t.steps.empty());
    }
    SUBCASE("frozen sandpile keeps every snapshot") {
        ModelParams p = scenarios::sandpile_params();
        p.final_time = 0.2;
        const Trajectory t = run(p, u);
        CHECK(t.snapshots.size() == 21);
        for (const Snapshot& s : t.snapshots) CHECK(s.u.values == u.values);
        CHECK(t.snapshots.back().t == doctest::Approx(0.2).epsilon(1e-14));
    }
    SUBCASE("inadmissible initial data is projected with a warning") {
        ModelParams p = scenarios::sandpile_params();
        p.final_time = 0.0;
        HeightField spike(g);
        spike(15) = 1.0;
        const Trajectory t = run(p, spike);
        CHECK(t.warnings.size() == 1);
        CHECK(admissible(t.snapshots[0].u, 1.0));
    }
    SUBCASE("snapshot cadence keeps the final time") {
        ModelParams p = scenarios::sandpile_params();
        p.final_time = 0.095;
        const Trajectory t = run(p, u, 4);
        REQUIRE(t.snapshots.size() == 4);  // t = 0, 0.04, 0.08, 0.095
        CHECK(t.snapshots.back().t == doctest::Approx(0.095).epsilon(1e-14));
    }
}

TEST_CASE("strict mode stops on non-convergence") {
    const Grid g = Grid::make_1d(1.0, 31);
    ModelParams p = scenarios::sandpile_params();
    p.source = SourceSpec::patch(50.0, 0.4, 0.6);
    p.final_time = 0.05;
    p.solver.max_iter = 2;
    const Trajectory strict = run(p, HeightField(g));
    CHECK(strict.failed);
    CHECK_FALSE(strict.failure.empty());
    p.solver.strict = false;
    const Trajectory lenient = run(p, HeightField(g));
    CHECK_FALSE(lenient.failed);
    CHECK_FALSE(lenient.warnings.empty());
}

TEST_CASE("mass budget of a sourced sandpile step") {
    const Grid g = Grid::make_1d(1.0, 31);
    ModelParams p = scenarios::sandpile_params();
    p.source = SourceSpec::patch(1.0, 0.4, 0.6);
    const HeightField u(g);
    const StepResult r = step(u, 0.0, 0.01, p);
    CHECK(mass(r.u) == doctest::Approx(mass(u) + r.source_mass + r.avalanche_change - r.transport_outflow).epsilon(1e-12));
}

TEST_CASE("picard sweeps stop at the inner tolerance") {
    const Grid g = Grid::make_1d(1.0, 63);
    ModelParams p = scenarios::wind_params();
    p.picard_iters = 20;
    p.inner_tol = 1e-12;
    const HeightField u = scenarios::asymmetric_dune(g);
    const StepResult r = step(u, 0.0, cfl_dt(g, p), p);
    CHECK(r.picard_sweeps >= 2);
    CHECK(r.picard_sweeps <= 20);
    p.picard_iters = 1;
    CHECK(step(u, 0.0, cfl_dt(g, p), p).picard_sweeps == 1);
}

TEST_CASE("asymmetric dune migrates downwind") {
    const Grid g = Grid::make_1d(1.0, 64);
    ModelParams p = scenarios::wind_params();
    p.final_time = scenarios::time_for_steps(g, p, 200);
    const HeightField u0 = scenarios::asymmetric_dune(g);
    REQUIRE(admissible(u0, p.lambda));
    const Trajectory t = run(p, u0);
    REQUIRE_FALSE(t.failed);
    CHECK(t.steps.size() == 200);
    int prev = *crest_index(t.snapshots.front().u);
    for (const Snapshot& s : t.snapshots) {
        const int c = *crest_index(s.u);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(prev > *crest_index(u0));
}
