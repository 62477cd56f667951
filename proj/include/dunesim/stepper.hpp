#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dunesim/constitutive.hpp"
#include "dunesim/grid.hpp"
#include "dunesim/nonlocal.hpp"
#include "dunesim/projection.hpp"

namespace dunesim {

/// Source term f(t, x) (m/s).
struct SourceSpec {
    enum class Kind { zero, constant_patch, tabulated };

    struct Frame {
        double start_time = 0.0;
        std::vector<double> values;  // one per interior node
    };

    Kind kind = Kind::zero;
    // constant_patch: `rate` on nodes with x0 <= x <= x1 (and y0 <= y <= y1 in 2D).
    double rate = 0.0;
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    // tabulated: piecewise constant in time, frames sorted by start_time.
    std::vector<Frame> frames;

    static SourceSpec zero() { return {}; }
    static SourceSpec patch(double rate, double x0, double x1, double y0 = 0.0, double y1 = 0.0);

    HeightField evaluate(const Grid& grid, double t) const;
    std::string name() const;
};

struct KernelSpec {
    KernelProfile profile = KernelProfile::triangle;
    double radius = 0.05;
};

struct SolverSettings {
    double tol = 1e-8;
    int max_iter = 500000;
    /// Abort the run when a projection does not converge.
    bool strict = true;
};

struct ModelParams {
    double lambda = 1.0;
    HProfile h = HProfile::zero();
    GammaProfile gamma = GammaProfile::identity();
    KernelSpec kernel;
    SourceSpec source;
    double final_time = 1.0;
    /// Fixed step; std::nullopt selects cfl_dt.
    std::optional<double> dt;
    double cfl_number = 0.45;
    /// Step used when the transport speed bound is zero.
    double dt_max = 0.01;
    int picard_iters = 1;
    double inner_tol = 1e-10;
    SolverSettings solver;
    /// Test mode: skip the projection (pure transport).
    bool projection_enabled = true;

    void validate() const;
};

/// False when H or gamma is the zero profile; the kernel is then never built.
bool transport_active(const ModelParams& params);

/// F = gamma(u) H(K * d_x u) at every interior node (m^2/s per unit width).
HeightField transport_flux(const HeightField& u, const ModelParams& params);
HeightField transport_flux(const HeightField& u, const ModelParams& params, const DiscreteKernel& kernel);

/// Upwind divergence (F_i - F_{i-1}) / dx along x with F = 0 upstream of the domain.
HeightField transport_div(const HeightField& flux);

/// Upper bound on the transport speed used by cfl_dt.
double transport_speed_bound(const Grid& grid, const ModelParams& params);
/// cfl_number * dx / speed bound, or dt_max when the bound is zero.
double cfl_dt(const Grid& grid, const ModelParams& params);

struct StepResult {
    HeightField u;
    /// Effective multiplier m / dt of the avalanche term.
    MultiplierField m;
    VectorField dual;
    int projection_iterations = 0;
    double primal_dual_gap = 0.0;
    double constraint_violation = 0.0;
    bool converged = true;
    int picard_sweeps = 0;
    /// dt * sum f * cell volume.
    double source_mass = 0.0;
    /// dt * mass leaving through the downwind boundary.
    double transport_outflow = 0.0;
    /// Mass change caused by the projection.
    double avalanche_change = 0.0;
};

/**
 * One split step: explicit upwind transport with the flux frozen at the
 * current iterate, then the avalanche resolvent. With picard_iters > 1 the
 * flux is re-evaluated at the latest inner iterate until successive iterates
 * differ by at most params.inner_tol (max norm) or the sweeps run out.
 * Throws std::invalid_argument when dt exceeds cfl_dt.
 */
StepResult step(const HeightField& u, double t, double dt, const ModelParams& params,
                const VectorField* warm_start = nullptr);

struct StepDiagnostics {
    double t = 0.0;  // time at the end of the step
    double dt = 0.0;
    double mass = 0.0;
    double max_slope = 0.0;
    double crest_x = 0.0;
    int projection_iterations = 0;
    double primal_dual_gap = 0.0;
    double constraint_violation = 0.0;
    double cfl_number = 0.0;
    int picard_sweeps = 0;
    double source_mass = 0.0;
    double transport_outflow = 0.0;
    double avalanche_change = 0.0;
    bool converged = true;
};

struct Snapshot {
    double t = 0.0;
    HeightField u;
    MultiplierField m;
};

struct Trajectory {
    ModelParams params;
    Grid grid;
    std::vector<Snapshot> snapshots;
    std::vector<StepDiagnostics> steps;
    std::vector<std::string> warnings;
    bool failed = false;
    std::string failure;
};

/**
 * Integrates from u0 to params.final_time. Snapshots are kept at t = 0, every
 * `snapshot_every` steps, and at the final time. Initial data outside the
 * admissible set is projected first and a warning is recorded. Failures
 * (strict non-convergence) stop the run and are reported in the trajectory.
 */
Trajectory run(const ModelParams& params, const HeightField& u0, int snapshot_every = 1);

}  // namespace dunesim
