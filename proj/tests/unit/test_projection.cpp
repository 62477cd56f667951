#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dunesim/projection.hpp"

using namespace dunesim;

namespace {

HeightField random_field(const Grid& g, std::mt19937_64& rng, double amp) {
    std::normal_distribution<double> N(0.0, amp);
    HeightField v(g);
    for (double& x : v.values) x = N(rng);
    return v;
}

// Admissible field by rescaling a random walk so every slope and boundary step is <= lambda.
HeightField random_admissible(const Grid& g, double lambda, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    HeightField xi(g);
    double h = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        h += U(rng) * lambda * g.dx();
        xi(i) = h;
    }
    const double s = max_slope(xi);
    if (s > lambda) {
        for (double& v : xi.values) v *= lambda / s;
    }
    return xi;
}

}  // namespace

TEST_CASE("admissible input is a fixed point with zero multiplier") {
    const Grid g = Grid::make_1d(1.0, 31);
    HeightField v = dist_to_boundary(g);
    for (double& x : v.values) x *= 0.5;
    for (auto* fn : {&project_pdhg, &project_dykstra}) {
        const ProjectionResult r = fn(v, 1.0, {});
        CHECK(r.converged);
        CHECK(r.u.values == v.values);
        for (double m : r.m.values) CHECK(m == 0.0);
    }
    const ProjectionResult z = project_pdhg(HeightField(g), 1.0);
    for (double x : z.u.values) CHECK(x == 0.0);
    for (double m : z.m.values) CHECK(m == 0.0);
}

TEST_CASE("center spike on n = 31 agrees with Dykstra") {
    const Grid g = Grid::make_1d(1.0, 31);
    HeightField v(g);
    v(15) = 2.0;
    ProjectionOptions o;
    o.tol = 1e-10;
    const ProjectionResult a = project_pdhg(v, 1.0, o);
    const ProjectionResult b = project_dykstra(v, 1.0, o);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(norm_linf(a.u, b.u) <= 1e-6);
    CHECK(admissible(a.u, 1.0));
}

TEST_CASE("hand-solved three-node projection") {
    // lambda dx = 0.1, v = (0, 0.5, 0). By symmetry u = (a, b, a); minimizing
    // 2 a^2 + (b - 0.5)^2 with b - a <= 0.1 and a <= 0.1: both bind (the
    // unconstrained optimum on b = a + 0.1 is a = 2/15 > 0.1), so u = (0.1, 0.2, 0.1).
    const Grid g = Grid::make_1d(0.4, 3);
    const double lambda = 1.0;
    HeightField v(g);
    v(1) = 0.5;
    ProjectionOptions o;
    o.tol = 1e-12;
    for (auto* fn : {&project_pdhg, &project_dykstra}) {
        const ProjectionResult r = fn(v, lambda, o);
        CHECK(r.u(0) == doctest::Approx(0.1).epsilon(1e-9));
        CHECK(r.u(1) == doctest::Approx(0.2).epsilon(1e-9));
        CHECK(r.u(2) == doctest::Approx(0.1).epsilon(1e-9));
    }
}

TEST_CASE("projection satisfies the variational inequality against sampled admissible fields") {
    std::mt19937_64 rng(21);
    for (int n : {8, 33, 64}) {
        const Grid g = Grid::make_1d(1.0, n);
        const double lambda = 0.8;
        const HeightField v = random_field(g, rng, 0.3);
        ProjectionOptions o;
        o.tol = 1e-10;
        const ProjectionResult r = project_pdhg(v, lambda, o);
        REQUIRE(r.converged);
        CHECK(admissible(r.u, lambda));
        for (int k = 0; k < 100; ++k) {
            const HeightField xi = random_admissible(g, lambda, rng);
            double s = 0.0;
            for (std::size_t q = 0; q < xi.values.size(); ++q) s += (v.values[q] - r.u.values[q]) * (xi.values[q] - r.u.values[q]);
            CHECK(s <= 1e-8);
        }
    }
}

TEST_CASE("complementarity and dual consistency") {
    std::mt19937_64 rng(4);
    const Grid g = Grid::make(2, {1.0, 1.0}, {24, 24});
    const HeightField v = random_field(g, rng, 0.2);
    const ProjectionResult r = project_pdhg(v, 1.0);
    REQUIRE(r.converged);
    CHECK(r.constraint_violation <= kTolConstraint);
    const VectorField grad = grad_forward(r.u);
    double product = 0.0;
    for (std::size_t e = 0; e < r.m.values.size(); ++e) {
        CHECK(r.m.values[e] >= 0.0);
        product += r.m.values[e] * std::max(0.0, 1.0 - grad.magnitude(e));
    }
    CHECK(product * g.cell_volume() <= kMultiplierTol);
    // u = v + div p
    const HeightField d = div_backward(r.dual);
    for (std::size_t q = 0; q < v.values.size(); ++q) CHECK(r.u.values[q] == doctest::Approx(v.values[q] + d.values[q]));
    CHECK(duality_gap(r.u, r.dual, 1.0) <= 1e-8);
}

TEST_CASE("warm start reproduces the cold result") {
    std::mt19937_64 rng(8);
    const Grid g = Grid::make(2, {1.0, 1.0}, {20, 20});
    const HeightField v = random_field(g, rng, 0.3);
    ProjectionOptions o;
    o.tol = 1e-10;
    const ProjectionResult cold = project_pdhg(v, 1.0, o);
    o.warm_start = &cold.dual;
    const ProjectionResult warm = project_pdhg(v, 1.0, o);
    CHECK(warm.iterations <= cold.iterations);
    CHECK(norm_linf(cold.u, warm.u) <= 1e-7);
}

TEST_CASE("iteration cap reports non-convergence") {
    std::mt19937_64 rng(2);
    const Grid g = Grid::make_1d(1.0, 64);
    const HeightField v = random_field(g, rng, 1.0);
    ProjectionOptions o;
    o.max_iter = 3;
    const ProjectionResult r = project_pdhg(v, 1.0, o);
    CHECK_FALSE(r.converged);
    CHECK(r.u.finite());
}

TEST_CASE("Dykstra is 1D only") {
    const Grid g = Grid::make(2, {1, 1}, {4, 4});
    CHECK_THROWS_AS(project_dykstra(HeightField(g), 1.0), std::invalid_argument);
}

TEST_CASE("resolvent step") {
    const Grid g = Grid::make_1d(1.0, 31);
    HeightField u = dist_to_boundary(g);
    for (double& x : u.values) x *= 0.3;
    SUBCASE("no forcing keeps an admissible state") {
        const ResolventResult r = resolvent_step(u, HeightField(g), 0.01, 1.0);
        CHECK(r.projection.u.values == u.values);
    }
    SUBCASE("constant forcing equals the projection of the explicit update") {
        const double dt = 0.05, c = 2.0;
        const ResolventResult r = resolvent_step(u, HeightField(g, c), dt, 1.0);
        HeightField pred = u;
        for (double& x : pred.values) x += dt * c;
        const ProjectionResult p = project_pdhg(pred, 1.0);
        CHECK(norm_linf(r.projection.u, p.u) <= 1e-7);
        for (std::size_t e = 0; e < p.m.values.size(); ++e) {
            CHECK(r.effective_m.values[e] == doctest::Approx(r.projection.m.values[e] / dt));
        }
    }
}
