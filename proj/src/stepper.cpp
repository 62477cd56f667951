#include "dunesim/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "dunesim/analytics.hpp"
#include "dunesim/errors.hpp"

namespace dunesim {

SourceSpec SourceSpec::patch(double rate, double x0, double x1, double y0, double y1) {
    SourceSpec s;
    s.kind = Kind::constant_patch;
    s.rate = rate;
    s.x0 = x0;
    s.x1 = x1;
    s.y0 = y0;
    s.y1 = y1;
    return s;
}

HeightField SourceSpec::evaluate(const Grid& grid, double t) const {
    HeightField f(grid);
    switch (kind) {
        case Kind::zero: break;
        case Kind::constant_patch: {
            const double slack = 1e-9 * grid.dx();
            for (int j = 0; j < grid.ny(); ++j) {
                if (grid.dim() == 2 && (grid.y(j) < y0 - slack || grid.y(j) > y1 + slack)) continue;
                for (int i = 0; i < grid.nx(); ++i) {
                    if (grid.x(i) >= x0 - slack && grid.x(i) <= x1 + slack) f(i, j) = rate;
                }
            }
            break;
        }
        case Kind::tabulated: {
            const Frame* active = nullptr;
            for (const Frame& fr : frames) {
                if (fr.start_time <= t) active = &fr;
            }
            if (active != nullptr) {
                if (active->values.size() != grid.size()) {
                    throw std::invalid_argument(fmt::format("tabulated source has {} values, grid has {} nodes",
                                                            active->values.size(), grid.size()));
                }
                f.values = active->values;
            }
            break;
        }
    }
    return f;
}

std::string SourceSpec::name() const {
    switch (kind) {
        case Kind::zero: return "zero";
        case Kind::constant_patch: return "constant_patch";
        case Kind::tabulated: return "tabulated";
    }
    return "unknown";
}

void ModelParams::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument(fmt::format("lambda must be positive, got {}", lambda));
    }
    if (!(final_time >= 0.0) || !std::isfinite(final_time)) {
        throw std::invalid_argument(fmt::format("final time must be >= 0, got {}", final_time));
    }
    if (dt && !(*dt > 0.0)) throw std::invalid_argument(fmt::format("dt must be positive, got {}", *dt));
    if (!(cfl_number > 0.0)) throw std::invalid_argument("cfl number must be positive");
    if (!(dt_max > 0.0)) throw std::invalid_argument("dt_max must be positive");
    if (picard_iters < 1) throw std::invalid_argument("picard_iters must be >= 1");
    if (!(kernel.radius > 0.0)) throw std::invalid_argument("kernel radius must be positive");
}

bool transport_active(const ModelParams& params) {
    return params.h.kind != HProfile::Kind::zero && params.gamma.kind != GammaProfile::Kind::zero;
}

HeightField transport_flux(const HeightField& u, const ModelParams& params) {
    if (!transport_active(params)) return HeightField(u.grid);
    return transport_flux(u, params, build_kernel(params.kernel.profile, params.kernel.radius, u.grid.dx()));
}

HeightField transport_flux(const HeightField& u, const ModelParams& params, const DiscreteKernel& kernel) {
    HeightField flux(u.grid);
    if (!transport_active(params)) return flux;
    const HeightField s = nonlocal_slope(u, kernel);
    for (std::size_t k = 0; k < flux.values.size(); ++k) {
        flux.values[k] = gamma_eval(params.gamma, u.values[k]) * h_eval(params.h, s.values[k]);
    }
    return flux;
}

HeightField transport_div(const HeightField& flux) {
    const Grid& g = flux.grid;
    HeightField d(g);
    const double inv_dx = 1.0 / g.dx();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) d(i, j) = (flux(i, j) - flux.at(i - 1, j)) * inv_dx;
    }
    return d;
}

double transport_speed_bound(const Grid& grid, const ModelParams& params) {
    if (!transport_active(params)) return 0.0;
    const DiscreteKernel kernel = build_kernel(params.kernel.profile, params.kernel.radius, grid.dx());
    const double max_height = params.lambda * grid.diameter();
    return lipschitz_bound(params.gamma) * h_sup(params.h) +
           gamma_sup(params.gamma, max_height) * lipschitz_bound(params.h) * kernel.derivative_l1();
}

double cfl_dt(const Grid& grid, const ModelParams& params) {
    const double speed = transport_speed_bound(grid, params);
    if (!(speed > 0.0)) return params.dt_max;
    return params.cfl_number * grid.dx() / speed;
}

StepResult step(const HeightField& u, double t, double dt, const ModelParams& params, const VectorField* warm_start) {
    const double dt_limit = cfl_dt(u.grid, params);
    if (!(dt > 0.0)) throw std::invalid_argument(fmt::format("time step must be positive, got {}", dt));
    if (dt > dt_limit * (1.0 + 1e-12)) {
        throw std::invalid_argument(fmt::format("time step {} exceeds the CFL limit {}", dt, dt_limit));
    }
    const Grid& grid = u.grid;
    const DiscreteKernel kernel = transport_active(params)
                                      ? build_kernel(params.kernel.profile, params.kernel.radius, grid.dx())
                                      : DiscreteKernel{};
    const HeightField f = params.source.evaluate(grid, t);
    const double vol = grid.cell_volume();

    ProjectionOptions popts;
    popts.tol = params.solver.tol;
    popts.max_iter = params.solver.max_iter;
    popts.warm_start = warm_start;

    StepResult out;
    HeightField inner = u;
    for (int sweep = 1; sweep <= params.picard_iters; ++sweep) {
        const HeightField flux = transport_flux(inner, params, kernel);
        const HeightField div = transport_div(flux);
        HeightField g(grid);
        for (std::size_t k = 0; k < g.values.size(); ++k) g.values[k] = f.values[k] - div.values[k];

        double outflow = 0.0;
        for (int j = 0; j < grid.ny(); ++j) outflow += flux(grid.nx() - 1, j);
        out.transport_outflow = dt * outflow * (grid.dim() == 2 ? grid.dy() : 1.0);
        out.picard_sweeps = sweep;

        HeightField predicted = u;
        for (std::size_t k = 0; k < predicted.values.size(); ++k) predicted.values[k] += dt * g.values[k];

        HeightField next;
        if (params.projection_enabled) {
            ResolventResult r = resolvent_step(u, g, dt, params.lambda, popts);
            out.projection_iterations += r.projection.iterations;
            out.primal_dual_gap = r.projection.primal_dual_gap;
            out.constraint_violation = r.projection.constraint_violation;
            out.converged = r.projection.converged;
            out.m = std::move(r.effective_m);
            out.dual = std::move(r.projection.dual);
            next = std::move(r.projection.u);
        } else {
            out.m = MultiplierField(grid);
            out.dual = VectorField(grid);
            out.constraint_violation = constraint_violation(predicted, params.lambda);
            next = predicted;
        }
        out.avalanche_change = mass(next) - mass(predicted);
        const double change = norm_linf(next, inner);
        inner = std::move(next);
        if (params.picard_iters == 1 || change <= params.inner_tol) break;
    }

    double source = 0.0;
    for (double v : f.values) source += v;
    out.source_mass = dt * source * vol;
    out.u = std::move(inner);
    return out;
}

Trajectory run(const ModelParams& params, const HeightField& u0, int snapshot_every) {
    params.validate();
    if (snapshot_every < 1) throw std::invalid_argument("snapshot_every must be >= 1");
    if (!u0.finite()) throw std::invalid_argument("initial height field contains non-finite values");

    Trajectory traj;
    traj.params = params;
    traj.grid = u0.grid;
    const Grid& grid = u0.grid;

    HeightField u = u0;
    if (!admissible(u0, params.lambda, params.solver.tol)) {
        traj.warnings.push_back(fmt::format(
            "initial data violates the slope constraint by {:.3e}; projecting onto the admissible set",
            constraint_violation(u0, params.lambda)));
        ProjectionOptions popts;
        popts.tol = params.solver.tol;
        popts.max_iter = params.solver.max_iter;
        ProjectionResult r = project_pdhg(u0, params.lambda, popts);
        if (!r.converged && params.solver.strict) {
            traj.failed = true;
            traj.failure = "projection of the initial data did not converge";
            return traj;
        }
        u = std::move(r.u);
    }
    traj.snapshots.push_back({0.0, u, MultiplierField(grid)});

    const double dt_nominal = params.dt ? *params.dt : cfl_dt(grid, params);
    const double speed = transport_speed_bound(grid, params);
    const double end = params.final_time;

    VectorField dual;
    bool have_dual = false;
    double dt_prev = dt_nominal;
    double t = 0.0;
    int n = 0;
    while (t < end && end - t > 1e-12 * std::max(1.0, end)) {
        const double dt = std::min(dt_nominal, end - t);
        if (have_dual && dt != dt_prev) {
            const double scale = dt / dt_prev;
            for (double& v : dual.x) v *= scale;
            for (double& v : dual.y) v *= scale;
        }
        StepResult r;
        try {
            r = step(u, t, dt, params, have_dual ? &dual : nullptr);
        } catch (const std::exception& e) {
            traj.failed = true;
            traj.failure = fmt::format("step {} at t={}: {}", n + 1, t, e.what());
            break;
        }
        ++n;
        t += dt;
        if (end - t <= 1e-12 * std::max(1.0, end)) t = end;

        StepDiagnostics d;
        d.t = t;
        d.dt = dt;
        d.mass = mass(r.u);
        d.max_slope = max_slope(r.u);
        const std::optional<int> crest = crest_index(r.u);
        d.crest_x = crest ? grid.x(*crest) : 0.0;
        d.projection_iterations = r.projection_iterations;
        d.primal_dual_gap = r.primal_dual_gap;
        d.constraint_violation = r.constraint_violation;
        d.cfl_number = dt * speed / grid.dx();
        d.picard_sweeps = r.picard_sweeps;
        d.source_mass = r.source_mass;
        d.transport_outflow = r.transport_outflow;
        d.avalanche_change = r.avalanche_change;
        d.converged = r.converged;
        traj.steps.push_back(d);

        if (!r.converged) {
            if (params.solver.strict) {
                traj.failed = true;
                traj.failure = fmt::format("projection did not converge at step {} (gap {:.3e}, violation {:.3e})",
                                           n, r.primal_dual_gap, r.constraint_violation);
                traj.snapshots.push_back({t, std::move(r.u), std::move(r.m)});
                break;
            }
            traj.warnings.push_back(fmt::format("step {}: projection not converged, continuing (lenient)", n));
        }

        u = std::move(r.u);
        dual = std::move(r.dual);
        have_dual = params.projection_enabled;
        dt_prev = dt;
        const bool last = t >= end;
        if (n % snapshot_every == 0 || last) traj.snapshots.push_back({t, u, std::move(r.m)});
    }
    return traj;
}

}  // namespace dunesim
