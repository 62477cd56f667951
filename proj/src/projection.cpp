#include "dunesim/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dunesim {

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument(fmt::format("repose slope lambda must be positive, got {}", lambda));
    }
}

void check_input(const HeightField& v) {
    if (!v.finite()) throw std::invalid_argument("projection input contains non-finite values");
}

MultiplierField multiplier_from_dual(const VectorField& p, double lambda) {
    MultiplierField m(p.grid);
    for (std::size_t e = 0; e < m.values.size(); ++e) {
        const double py = p.y.empty() ? 0.0 : p.y[e];
        m.values[e] = std::hypot(p.x[e], py) / lambda;
    }
    return m;
}

// u = v + div p
HeightField primal_from_dual(const HeightField& v, const VectorField& p) {
    HeightField u = div_backward(p);
    for (std::size_t k = 0; k < u.values.size(); ++k) u.values[k] += v.values[k];
    return u;
}

// Proximal map of t * lambda |.|_*: the dual-norm shrinkage.
void shrink(VectorField& q, double threshold) {
    const bool aniso = q.y.empty() || q.grid.norm() == GradientNorm::anisotropic;
    if (aniso) {
        auto soft = [threshold](double a) {
            const double m = std::abs(a) - threshold;
            return m > 0.0 ? std::copysign(m, a) : 0.0;
        };
        for (double& a : q.x) a = soft(a);
        for (double& a : q.y) a = soft(a);
        return;
    }
    for (std::size_t e = 0; e < q.x.size(); ++e) {
        const double n = std::hypot(q.x[e], q.y[e]);
        const double s = n > threshold ? 1.0 - threshold / n : 0.0;
        q.x[e] *= s;
        q.y[e] *= s;
    }
}

ProjectionResult finish(const HeightField& v, VectorField p, double lambda, int iterations, double tol) {
    ProjectionResult r;
    r.u = primal_from_dual(v, p);
    r.primal_dual_gap = duality_gap(r.u, p, lambda);
    r.constraint_violation = constraint_violation(r.u, lambda);
    r.converged = r.primal_dual_gap <= tol && r.constraint_violation <= tol;
    r.m = multiplier_from_dual(p, lambda);
    r.dual = std::move(p);
    r.iterations = iterations;
    return r;
}

ProjectionResult identity_projection(const HeightField& v, double lambda) {
    ProjectionResult r;
    r.u = v;
    r.m = MultiplierField(v.grid);
    r.dual = VectorField(v.grid);
    r.constraint_violation = constraint_violation(v, lambda);
    r.converged = true;
    return r;
}

}  // namespace

double duality_gap(const HeightField& u, const VectorField& dual, double lambda) {
    const VectorField g = grad_forward(u);
    const bool aniso = dual.grid.norm() == GradientNorm::anisotropic;
    double gap = 0.0;
    for (std::size_t e = 0; e < g.x.size(); ++e) {
        double support = 0.0;
        double pairing = dual.x[e] * g.x[e];
        if (dual.y.empty()) {
            support = std::abs(dual.x[e]);
        } else {
            support = aniso ? std::abs(dual.x[e]) + std::abs(dual.y[e]) : std::hypot(dual.x[e], dual.y[e]);
            pairing += dual.y[e] * g.y[e];
        }
        gap += lambda * support - pairing;
    }
    return gap;
}

ProjectionResult project_pdhg(const HeightField& v, double lambda, const ProjectionOptions& options) {
    check_lambda(lambda);
    check_input(v);
    const Grid& grid = v.grid;
    if (constraint_violation(v, lambda) <= options.tol) return identity_projection(v, lambda);

    // |grad|^2 <= 4/dx^2 (+ 4/dy^2): each forward difference has two unit taps.
    double lipschitz = 4.0 / (grid.dx() * grid.dx());
    if (grid.dim() == 2) lipschitz += 4.0 / (grid.dy() * grid.dy());
    const double step = 1.0 / lipschitz;

    VectorField p(grid);
    if (options.warm_start != nullptr) {
        if (!options.warm_start->grid.same_shape(grid)) {
            throw std::invalid_argument("warm-start dual does not match the grid");
        }
        p = *options.warm_start;
    }
    VectorField y = p;
    VectorField p_prev = p;
    VectorField best = p;
    double best_score = INFINITY;
    double momentum = 1.0;

    constexpr int kCheckEvery = 10;
    for (int it = 1; it <= options.max_iter; ++it) {
        // Dual ascent step at the extrapolated point, then shrinkage.
        const HeightField u_y = primal_from_dual(v, y);
        const VectorField g = grad_forward(u_y);
        VectorField q = y;
        for (std::size_t e = 0; e < q.x.size(); ++e) q.x[e] += step * g.x[e];
        for (std::size_t e = 0; e < q.y.size(); ++e) q.y[e] += step * g.y[e];
        shrink(q, step * lambda);

        p_prev = std::move(p);
        p = std::move(q);

        // Restart when the step opposes the momentum direction.
        double align = 0.0;
        for (std::size_t e = 0; e < p.x.size(); ++e) align += (y.x[e] - p.x[e]) * (p.x[e] - p_prev.x[e]);
        for (std::size_t e = 0; e < p.y.size(); ++e) align += (y.y[e] - p.y[e]) * (p.y[e] - p_prev.y[e]);
        if (align > 0.0) {
            momentum = 1.0;
            y = p;
        } else {
            const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            const double beta = (momentum - 1.0) / next;
            momentum = next;
            for (std::size_t e = 0; e < p.x.size(); ++e) y.x[e] = p.x[e] + beta * (p.x[e] - p_prev.x[e]);
            for (std::size_t e = 0; e < p.y.size(); ++e) y.y[e] = p.y[e] + beta * (p.y[e] - p_prev.y[e]);
        }

        if (it % kCheckEvery == 0 || it == options.max_iter) {
            const HeightField u = primal_from_dual(v, p);
            const double gap = duality_gap(u, p, lambda);
            const double viol = constraint_violation(u, lambda);
            if (gap <= options.tol && viol <= options.tol) return finish(v, std::move(p), lambda, it, options.tol);
            const double score = std::max(gap, viol);
            if (score < best_score) {
                best_score = score;
                best = p;
            }
        }
    }
    return finish(v, std::move(best), lambda, options.max_iter, options.tol);
}

ProjectionResult project_dykstra(const HeightField& v, double lambda, const ProjectionOptions& options) {
    check_lambda(lambda);
    check_input(v);
    const Grid& grid = v.grid;
    if (grid.dim() != 1) throw std::invalid_argument("Dykstra projection is implemented for 1D grids only");
    if (constraint_violation(v, lambda) <= options.tol) return identity_projection(v, lambda);

    const int n = grid.nx();
    const double bound = lambda * grid.dx();
    std::vector<double> u = v.values;
    // Increment of slab e (between nodes e-1 and e), stored as the scalar y_e
    // with u = v - D^T y, D the unscaled forward difference.
    std::vector<double> y(static_cast<std::size_t>(n + 1), 0.0);

    auto dual_field = [&] {
        VectorField p(grid);
        for (int e = 0; e <= n; ++e) p.x[grid.edge_index(e - 1)] = y[static_cast<std::size_t>(e)] * grid.dx();
        return p;
    };

    VectorField best = dual_field();
    double best_score = INFINITY;
    for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
        for (int e = 0; e <= n; ++e) {
            const auto ue = static_cast<std::size_t>(e);
            const bool has_left = e > 0;
            const bool has_right = e < n;
            double left = has_left ? u[ue - 1] : 0.0;
            double right = has_right ? u[ue] : 0.0;
            // Undo this slab's previous correction.
            const double old = y[ue];
            if (has_left) left -= old;
            if (has_right) right += old;
            const double diff = right - left;
            const double excess = diff - std::clamp(diff, -bound, bound);
            const double corr = excess / ((has_left ? 1.0 : 0.0) + (has_right ? 1.0 : 0.0));
            if (has_left) u[ue - 1] = left + corr;
            if (has_right) u[ue] = right - corr;
            y[ue] = corr;
        }
        const VectorField p = dual_field();
        const HeightField uf(grid, u);
        const double gap = duality_gap(uf, p, lambda);
        const double viol = constraint_violation(uf, lambda);
        if (gap <= options.tol && viol <= options.tol) {
            ProjectionResult r = finish(v, p, lambda, sweep, options.tol);
            // Keep the iterate itself rather than v + div p (equal up to roundoff).
            r.u = uf;
            r.primal_dual_gap = gap;
            r.constraint_violation = viol;
            r.converged = true;
            return r;
        }
        const double score = std::max(gap, viol);
        if (score < best_score) {
            best_score = score;
            best = p;
        }
    }
    return finish(v, std::move(best), lambda, options.max_iter, options.tol);
}

ResolventResult resolvent_step(const HeightField& u_prev, const HeightField& g, double dt, double lambda,
                               const ProjectionOptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument(fmt::format("time step must be positive, got {}", dt));
    if (!g.grid.same_shape(u_prev.grid)) throw std::invalid_argument("resolvent: field shapes differ");
    HeightField v = u_prev;
    for (std::size_t k = 0; k < v.values.size(); ++k) v.values[k] += dt * g.values[k];
    ResolventResult r;
    r.projection = project_pdhg(v, lambda, options);
    r.effective_m = r.projection.m;
    for (double& m : r.effective_m.values) m /= dt;
    return r;
}

}  // namespace dunesim
