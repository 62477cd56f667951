#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dunesim/nonlocal.hpp"
#include "dunesim/verify.hpp"
#include "scenarios.hpp"

using namespace dunesim;

namespace {

Trajectory frozen_run(const Grid& g, int steps) {
    ModelParams p = scenarios::sandpile_params();
    p.final_time = steps * p.dt_max;
    HeightField u = dist_to_boundary(g);
    for (double& v : u.values) v *= 0.7;
    return run(p, u);
}

Trajectory wind_run(const Grid& g, int steps, double center = 0.4) {
    ModelParams p = scenarios::wind_params();
    p.final_time = scenarios::time_for_steps(g, p, steps);
    return run(p, scenarios::asymmetric_dune(g, center));
}

}  // namespace

TEST_CASE("truncation and its primitive") {
    CHECK(truncate(2.0, 1.0) == 1.0);
    CHECK(truncate(-2.0, 1.0) == -1.0);
    CHECK(truncate(0.3, 1.0) == 0.3);
    CHECK(truncate(5.0, kNoTruncation) == 5.0);
    // Midpoint-rule integral of T_k as an independent check of the closed form.
    for (double k : {0.01, 0.1, 1.0}) {
        for (double r : {-2.5, -0.05, 0.0, 0.003, 0.7, 3.0}) {
            const int n = 200000;
            double s = 0.0;
            for (int q = 0; q < n; ++q) s += truncate((q + 0.5) * r / n, k) * r / n;
            CHECK(truncated_primitive(r, k) == doctest::Approx(s).epsilon(1e-8));
        }
    }
}

TEST_CASE("test function set") {
    for (const Grid& g : {Grid::make_1d(1.0, 64), Grid::make(2, {1.0, 1.0}, {32, 32})}) {
        const double lambda = 0.5;
        const TestFunctionSet set = make_test_functions(g, lambda, 5, 42);
        REQUIRE(set.members.size() == 2 + 6 + 5);
        for (double v : set.members[0].values) CHECK(v == 0.0);
        for (const HeightField& xi : set.members) CHECK(admissible(xi, lambda));
        const TestFunctionSet again = make_test_functions(g, lambda, 5, 42);
        for (std::size_t m = 0; m < set.members.size(); ++m) CHECK(set.members[m].values == again.members[m].values);
        const TestFunctionSet other = make_test_functions(g, lambda, 5, 43);
        CHECK(other.members.back().values != set.members.back().values);
    }
    // In 1D the maximal cone needs no rescaling.
    const Grid g = Grid::make_1d(1.0, 64);
    const TestFunctionSet set = make_test_functions(g, 1.0, 1, 0);
    const HeightField d = dist_to_boundary(g);
    for (std::size_t q = 0; q < d.values.size(); ++q) CHECK(set.members[1].values[q] == d.values[q]);
    CHECK_THROWS_AS(make_test_functions(g, 1.0, 0, 0), std::invalid_argument);
}

TEST_CASE("variational residual vanishes on the frozen sandpile") {
    const Grid g = Grid::make_1d(1.0, 64);
    const Trajectory t = frozen_run(g, 20);
    const TestFunctionSet tests = make_test_functions(g, 1.0, 4, 9);
    const VIReport rep = vi_report(t, tests, 1e-10);
    CHECK(rep.pass);
    for (const VIRecord& r : rep.records) CHECK(std::abs(r.residual) <= 1e-10);
}

TEST_CASE("large truncation level matches the untruncated pairing") {
    const Grid g = Grid::make_1d(1.0, 64);
    const Trajectory t = wind_run(g, 30);
    const TestFunctionSet tests = make_test_functions(g, 1.0, 2, 5);
    const double k = 10.0 * t.params.lambda * g.diameter();
    const double vol = g.cell_volume();
    for (const HeightField& xi : tests.members) {
        const auto rec = vi_residual(t, xi, k);
        for (std::size_t n = 0; n + 1 < t.snapshots.size(); ++n) {
            // Untruncated form built from transport_flux (the K * d_x u route) and plain sums.
            const HeightField& a = t.snapshots[n].u;
            const HeightField& b = t.snapshots[n + 1].u;
            const double dt = t.snapshots[n + 1].t - t.snapshots[n].t;
            double ea = 0.0, eb = 0.0, pair = 0.0;
            const HeightField flux = transport_flux(a, t.params);
            for (int i = 0; i < g.nx(); ++i) {
                ea += 0.5 * (a(i) - xi(i)) * (a(i) - xi(i));
                eb += 0.5 * (b(i) - xi(i)) * (b(i) - xi(i));
                const double w_next = i + 1 < g.nx() ? a(i + 1) - xi(i + 1) : 0.0;
                pair += flux(i) * (w_next - (a(i) - xi(i))) / g.dx();
            }
            const double untruncated = (eb - ea) * vol / dt - pair * vol;
            CHECK(std::abs(rec[n].residual - untruncated) <= 1e-8);
        }
    }
}

TEST_CASE("variational residual on a mismatched grid") {
    const Trajectory t = frozen_run(Grid::make_1d(1.0, 64), 2);
    CHECK_THROWS_AS(vi_residual(t, HeightField(Grid::make_1d(1.0, 32)), 1.0), std::invalid_argument);
}

TEST_CASE("complementarity") {
    const Grid g = Grid::make_1d(1.0, 64);
    SUBCASE("frozen sandpile has no multiplier") {
        const Trajectory t = frozen_run(g, 10);
        for (const Snapshot& s : t.snapshots) {
            for (double m : s.m.values) CHECK(m == 0.0);
        }
        const ComplementarityReport r = complementarity_report(t);
        CHECK(r.pass);
        CHECK(r.worst == 0.0);
    }
    SUBCASE("wind-on run") {
        const ComplementarityReport r = complementarity_report(wind_run(g, 50));
        CHECK(r.pass);
        CHECK(r.worst <= 1e-6);
    }
}

TEST_CASE("avalanche channel of a fed sandpile") {
    // Centered source on a pile already close to the maximal cone: the
    // multiplier is active on a connected set of edges where the slope is at lambda.
    const Grid g = Grid::make_1d(1.0, 63);
    ModelParams p = scenarios::sandpile_params();
    p.source = SourceSpec::patch(5.0, 0.49, 0.51);
    p.final_time = 0.5;
    p.dt = 0.01;
    HeightField u = dist_to_boundary(g);
    for (double& v : u.values) v *= 0.9;
    const Trajectory t = run(p, u, 10);
    REQUIRE_FALSE(t.failed);
    const Snapshot& last = t.snapshots.back();
    const ActiveSet a = active_set(last.u, last.m, p.lambda, 1e-9, 1e-6);
    REQUIRE(a.edges.size() >= 2);
    for (bool s : a.saturated) CHECK(s);
    for (std::size_t q = 1; q < a.edges.size(); ++q) {
        // Contiguous apart from the single gap at the summit, where flow splits both ways.
        CHECK(a.edges[q] - a.edges[q - 1] <= 2);
    }
}

TEST_CASE("contraction reports") {
    const Grid g = Grid::make_1d(1.0, 64);
    SUBCASE("identical data") {
        const Trajectory a = wind_run(g, 20);
        const ContractionReport r = contraction_report(a, wind_run(g, 20), 0.0, 0.0);
        for (double d : r.distance) CHECK(d == 0.0);
        CHECK(r.pass);
    }
    SUBCASE("projection flow is nonexpansive in L2") {
        ModelParams p = scenarios::sandpile_params();
        p.source = SourceSpec::patch(2.0, 0.3, 0.7);
        p.final_time = 0.3;
        HeightField u1(g), u2 = dist_to_boundary(g);
        for (double& v : u2.values) v *= 0.5;
        const ContractionReport r = contraction_report(run(p, u1), run(p, u2), 0.0, 1e-8, DistanceNorm::l2);
        CHECK(r.pass);
        CHECK(r.distance.back() < r.distance.front());
    }
    SUBCASE("mismatched models are rejected") {
        ModelParams p = scenarios::sandpile_params();
        p.final_time = 0.02;
        ModelParams q = p;
        q.lambda = 0.5;
        CHECK_THROWS_AS(contraction_report(run(p, HeightField(g)), run(q, HeightField(g)), 0.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("Gronwall constant") {
    const Grid g = Grid::make_1d(1.1, 10);  // dx = 0.1
    ModelParams p;
    p.lambda = 0.5;
    p.h = HProfile::smooth_ramp();
    p.gamma = GammaProfile::scaled_identity(2.0);
    p.kernel = {KernelProfile::triangle, 0.2};  // weights (2.5, 5, 2.5): |K'|_1 = 10, |K''|_1 = 100
    // Lip(gamma) Lip(H) lambda |K'|_1 twice, plus sup gamma Lip(H) |K''|_1 with sup gamma = 2 * 0.5 * 1.1.
    CHECK(gronwall_constant(g, p) == doctest::Approx(2 * 1 * 0.5 * 10 * 2 + 1.1 * 1 * 100));
    p.h = HProfile::zero();
    CHECK(gronwall_constant(g, p) == 0.0);
}
