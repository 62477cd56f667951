#pragma once

#include <vector>

#include "dunesim/grid.hpp"

namespace dunesim {

/// Nonnegative multiplier density m on the edge layout of its grid
/// (the same nodes where grad_forward is defined).
struct MultiplierField {
    Grid grid;
    std::vector<double> values;

    MultiplierField() = default;
    explicit MultiplierField(const Grid& g) : grid(g), values(g.edge_size(), 0.0) {}
};

struct ProjectionOptions {
    /// Stop once the duality gap and the constraint violation are both <= tol.
    double tol = 1e-8;
    int max_iter = 500000;
    /// Dual field to start from (e.g. the previous time step's); must match the grid.
    const VectorField* warm_start = nullptr;
};

struct ProjectionResult {
    HeightField u;
    MultiplierField m;
    /// Dual vector field p with u = v + div p; m = |p| / lambda.
    VectorField dual;
    int iterations = 0;
    double primal_dual_gap = 0.0;
    double constraint_violation = 0.0;
    bool converged = false;
};

/// Default tolerances for the diagnostics attached to projections.
inline constexpr double kTolConstraint = 1e-8;
inline constexpr double kMultiplierTol = 1e-6;
inline constexpr double kSlackTol = 1e-6;

/**
 * L2 projection of v onto {u : |grad u| <= lambda, u = 0 on the boundary}.
 *
 * Primal-dual scheme on min_u 1/2 |u - v|^2 + I(|grad u| <= lambda): the
 * primal update is taken exactly (u = v + div p), which reduces each
 * iteration to a proximal step on the dual with step 1/L, L >= |grad|^2.
 * Nesterov extrapolation with gradient-based adaptive restart gives linear
 * convergence on this problem. On max_iter the iterate with the smallest
 * max(gap, violation) is returned with converged = false.
 */
ProjectionResult project_pdhg(const HeightField& v, double lambda, const ProjectionOptions& options = {});

/**
 * Same projection by Dykstra's cyclic projections onto the two-node slabs
 * |u_{i+1} - u_i| <= lambda dx and the boundary pins |u_0|, |u_{n-1}| <= lambda dx.
 * 1D grids only.
 */
ProjectionResult project_dykstra(const HeightField& v, double lambda, const ProjectionOptions& options = {});

/// sum_e lambda |p_e|_* - p_e . grad u_e, where |.|_* is the dual of the grid's slope norm.
/// Nonnegative for admissible u; zero at the projection.
double duality_gap(const HeightField& u, const VectorField& dual, double lambda);

struct ResolventResult {
    ProjectionResult projection;
    /// m / dt: the multiplier of du/dt - div(m grad u) = g.
    MultiplierField effective_m;
};

/// One implicit Euler step of du/dt + dI_Lip(u) contains g: project(u_prev + dt g).
ResolventResult resolvent_step(const HeightField& u_prev, const HeightField& g, double dt, double lambda,
                               const ProjectionOptions& options = {});

}  // namespace dunesim
