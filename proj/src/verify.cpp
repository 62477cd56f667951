#include "dunesim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "dunesim/nonlocal.hpp"
#include "dunesim/projection.hpp"

namespace dunesim {

double truncate(double r, double k) { return std::max(std::min(r, k), -k); }

double truncated_primitive(double r, double k) {
    const double a = std::abs(r);
    if (a <= k) return 0.5 * r * r;
    return k * a - 0.5 * k * k;
}

double truncated_energy(const HeightField& u, const HeightField& xi, double k) {
    double s = 0.0;
    for (std::size_t n = 0; n < u.values.size(); ++n) {
        s += truncated_primitive(u.values[n] - xi.values[n], k) - truncated_primitive(-xi.values[n], k);
    }
    return s * u.grid.cell_volume();
}

namespace {

// Scale so that the largest slope is at most lambda; rounding-level excess is left alone.
void limit_slope(HeightField& xi, double lambda) {
    const double s = max_slope(xi);
    if (s > lambda * (1.0 + 1e-12)) {
        const double f = lambda / s;
        for (double& v : xi.values) v *= f;
    }
}

HeightField hat(const Grid& grid, double cx, double cy, double slope, double half_width) {
    HeightField h(grid);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const double r = grid.dim() == 2 ? std::hypot(grid.x(i) - cx, grid.y(j) - cy) : std::abs(grid.x(i) - cx);
            h(i, j) = std::max(0.0, slope * (half_width - r));
        }
    }
    return h;
}

void smooth(HeightField& f, int passes) {
    const Grid& g = f.grid;
    for (int p = 0; p < passes; ++p) {
        HeightField out(g);
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                double s = 2.0 * f(i, j) + f.at(i - 1, j) + f.at(i + 1, j);
                double w = 4.0;
                if (g.dim() == 2) {
                    s += f.at(i, j - 1) + f.at(i, j + 1);
                    w += 2.0;
                }
                out(i, j) = s / w;
            }
        }
        f = std::move(out);
    }
}

bool same_model(const ModelParams& a, const ModelParams& b) {
    return a.lambda == b.lambda && a.h.kind == b.h.kind && a.h.param == b.h.param && a.gamma.kind == b.gamma.kind &&
           a.gamma.a == b.gamma.a && a.gamma.b == b.gamma.b && a.kernel.profile == b.kernel.profile &&
           a.kernel.radius == b.kernel.radius && a.source.kind == b.source.kind && a.source.rate == b.source.rate &&
           a.source.x0 == b.source.x0 && a.source.x1 == b.source.x1 && a.source.y0 == b.source.y0 &&
           a.source.y1 == b.source.y1;
}

}  // namespace

TestFunctionSet make_test_functions(const Grid& grid, double lambda, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("test function count must be >= 1");
    TestFunctionSet set;
    set.seed = seed;
    set.truncation_levels = {0.01, 0.1, 1.0, kNoTruncation};

    set.members.emplace_back(grid);  // xi = 0
    HeightField cone = dist_to_boundary(grid);
    for (double& v : cone.values) v *= lambda;
    limit_slope(cone, lambda);
    set.members.push_back(std::move(cone));

    const double lx = grid.extent_x();
    const double ly = grid.dim() == 2 ? grid.extent_y() : 0.0;
    const double half = 0.2 * std::max(lx, ly);
    const double cy = 0.5 * ly;
    for (double frac : {0.25, 0.5, 0.75}) {
        for (double s : {0.5, 1.0}) {
            HeightField h = hat(grid, frac * lx, cy, s * lambda, half);
            for (std::size_t n = 0; n < h.values.size(); ++n) h.values[n] = std::min(h.values[n], set.members[1].values[n]);
            limit_slope(h, lambda);
            set.members.push_back(std::move(h));
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double amplitude = 0.5 * lambda * grid.diameter();
    ProjectionOptions popts;
    popts.tol = 1e-10;
    for (int c = 0; c < count; ++c) {
        HeightField noise(grid);
        for (double& v : noise.values) v = amplitude * normal(rng);
        smooth(noise, 4);
        HeightField xi = project_pdhg(noise, lambda, popts).u;
        limit_slope(xi, lambda);
        set.members.push_back(std::move(xi));
    }
    return set;
}

std::vector<VIRecord> vi_residual(const Trajectory& traj, const HeightField& xi, double k) {
    if (!xi.grid.same_shape(traj.grid)) throw std::invalid_argument("test function grid does not match the trajectory");
    const Grid& g = traj.grid;
    const ModelParams& params = traj.params;
    const DiscreteKernel kernel = transport_active(params)
                                      ? build_kernel(params.kernel.profile, params.kernel.radius, g.dx())
                                      : DiscreteKernel{};
    const double vol = g.cell_volume();

    std::vector<VIRecord> out;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const Snapshot& a = traj.snapshots[n];
        const Snapshot& b = traj.snapshots[n + 1];
        VIRecord r;
        r.k = k;
        r.interval = n;
        r.t0 = a.t;
        r.t1 = b.t;
        r.energy_rate = (truncated_energy(b.u, xi, k) - truncated_energy(a.u, xi, k)) / (b.t - a.t);

        HeightField w(g);
        for (std::size_t q = 0; q < w.values.size(); ++q) w.values[q] = truncate(a.u.values[q] - xi.values[q], k);

        if (transport_active(params)) {
            const HeightField s = nonlocal_slope_kernel_derivative(a.u, kernel);
            double pairing = 0.0;
            for (int j = 0; j < g.ny(); ++j) {
                for (int i = 0; i < g.nx(); ++i) {
                    const double flux = gamma_eval(params.gamma, a.u(i, j)) * h_eval(params.h, s(i, j));
                    pairing += flux * (w.at(i + 1, j) - w(i, j)) / g.dx();
                }
            }
            r.transport_pairing = pairing * vol;
        }
        const HeightField f = params.source.evaluate(g, a.t);
        double src = 0.0;
        for (std::size_t q = 0; q < f.values.size(); ++q) src += f.values[q] * w.values[q];
        r.source_pairing = src * vol;
        r.residual = r.energy_rate - r.transport_pairing - r.source_pairing;
        out.push_back(r);
    }
    return out;
}

VIReport vi_report(const Trajectory& traj, const TestFunctionSet& tests, double tol) {
    VIReport rep;
    rep.tol = tol;
    for (std::size_t m = 0; m < tests.members.size(); ++m) {
        for (double k : tests.truncation_levels) {
            for (VIRecord r : vi_residual(traj, tests.members[m], k)) {
                r.xi_index = m;
                rep.worst = std::max(rep.worst, r.residual);
                rep.records.push_back(r);
            }
        }
    }
    if (rep.records.empty()) rep.worst = 0.0;
    rep.pass = rep.worst <= tol;
    return rep;
}

ComplementarityReport complementarity_report(const Trajectory& traj, double tol) {
    ComplementarityReport rep;
    rep.tol = tol;
    const double lambda = traj.params.lambda;
    for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
        const Snapshot& s = traj.snapshots[n];
        const VectorField grad = grad_forward(s.u);
        const double vol = s.u.grid.cell_volume();
        ComplementarityRecord r;
        r.snapshot = n;
        r.t = s.t;
        for (std::size_t e = 0; e < s.m.values.size(); ++e) {
            const double prod = s.m.values[e] * std::max(0.0, lambda - grad.magnitude(e));
            r.product_sum += prod * vol;
            r.product_max = std::max(r.product_max, prod);
        }
        rep.worst = std::max(rep.worst, r.product_sum);
        rep.records.push_back(r);
    }
    rep.pass = rep.worst <= tol;
    return rep;
}

ActiveSet active_set(const HeightField& u, const MultiplierField& m, double lambda, double m_floor, double slack) {
    const VectorField grad = grad_forward(u);
    ActiveSet a;
    for (std::size_t e = 0; e < m.values.size(); ++e) {
        if (m.values[e] > m_floor) {
            a.edges.push_back(e);
            a.saturated.push_back(grad.magnitude(e) >= lambda - slack);
        }
    }
    return a;
}

double gronwall_constant(const Grid& grid, const ModelParams& params) {
    if (!transport_active(params)) return 0.0;
    const DiscreteKernel kernel = build_kernel(params.kernel.profile, params.kernel.radius, grid.dx());
    const double lip_gamma = lipschitz_bound(params.gamma);
    const double lip_h = lipschitz_bound(params.h);
    const double sup_gamma = gamma_sup(params.gamma, params.lambda * grid.diameter());
    const double k1 = kernel.derivative_l1();
    const double k2 = kernel.second_derivative_l1();
    // Flux-height term, its derivative along x, and the kernel curvature term.
    const double c1 = lip_gamma * lip_h * params.lambda * k1;
    const double c2 = lip_gamma * params.lambda * lip_h * k1;
    const double c3 = sup_gamma * lip_h * k2;
    return c1 + c2 + c3;
}

ContractionReport contraction_report(const Trajectory& a, const Trajectory& b, double rate, double env_tol,
                                     DistanceNorm norm) {
    if (!same_model(a.params, b.params)) throw std::invalid_argument("contraction report: model parameters differ");
    if (a.snapshots.size() != b.snapshots.size()) throw std::invalid_argument("contraction report: snapshot counts differ");
    ContractionReport rep;
    rep.rate = rate;
    for (std::size_t n = 0; n < a.snapshots.size(); ++n) {
        const Snapshot& sa = a.snapshots[n];
        const Snapshot& sb = b.snapshots[n];
        if (std::abs(sa.t - sb.t) > 1e-12 * std::max(1.0, std::abs(sa.t))) {
            throw std::invalid_argument(fmt::format("contraction report: snapshot {} times differ", n));
        }
        rep.times.push_back(sa.t);
        rep.distance.push_back(norm == DistanceNorm::l1 ? norm_l1(sa.u, sb.u) : norm_l2(sa.u, sb.u));
    }
    if (rep.distance.empty()) return rep;
    const double d0 = rep.distance.front();
    for (std::size_t n = 0; n < rep.distance.size(); ++n) {
        if (norm == DistanceNorm::l1) {
            rep.envelope.push_back(d0 * std::exp(rate * rep.times[n]) * (1.0 + env_tol));
            if (rep.distance[n] > rep.envelope.back()) rep.pass = false;
        } else {
            rep.envelope.push_back(n == 0 ? d0 : rep.distance[n - 1] + env_tol);
            if (rep.distance[n] > rep.envelope.back()) rep.pass = false;
        }
    }
    return rep;
}

}  // namespace dunesim
