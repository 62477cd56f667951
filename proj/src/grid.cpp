#include "dunesim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dunesim {

Grid Grid::make(int dim, std::array<double, 2> extents, std::array<int, 2> counts,
                GradientNorm norm) {
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument(fmt::format("grid dimension must be 1 or 2, got {}", dim));
    }
    for (int a = 0; a < dim; ++a) {
        if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
            throw std::invalid_argument(
                fmt::format("grid extent along axis {} must be positive, got {}", a, extents[a]));
        }
        if (counts[a] < 3) {
            throw std::invalid_argument(
                fmt::format("grid count along axis {} must be >= 3, got {}", a, counts[a]));
        }
    }
    Grid g;
    g.dim_ = dim;
    g.norm_ = norm;
    g.extents_ = {extents[0], dim == 2 ? extents[1] : 0.0};
    g.counts_ = {counts[0], dim == 2 ? counts[1] : 1};
    g.spacing_[0] = extents[0] / (counts[0] + 1);
    g.spacing_[1] = dim == 2 ? extents[1] / (counts[1] + 1) : 0.0;
    return g;
}

double Grid::diameter() const {
    return dim_ == 2 ? std::hypot(extents_[0], extents_[1]) : extents_[0];
}

bool Grid::same_shape(const Grid& other) const {
    return dim_ == other.dim_ && counts_ == other.counts_ && spacing_ == other.spacing_;
}

HeightField::HeightField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw std::invalid_argument(fmt::format("height field has {} values, grid has {} nodes",
                                                values.size(), grid.size()));
    }
}

double HeightField::at(int i, int j) const {
    if (i < 0 || i >= grid.nx() || j < 0 || j >= grid.ny()) return 0.0;
    return values[grid.index(i, j)];
}

bool HeightField::finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

VectorField::VectorField(const Grid& g) : grid(g), x(g.edge_size(), 0.0) {
    if (g.dim() == 2) y.assign(g.edge_size(), 0.0);
}

double VectorField::magnitude(std::size_t e) const {
    if (y.empty()) return std::abs(x[e]);
    if (grid.norm() == GradientNorm::anisotropic) return std::max(std::abs(x[e]), std::abs(y[e]));
    return std::hypot(x[e], y[e]);
}

HeightField dist_to_boundary(const Grid& grid) {
    HeightField d(grid);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            double dist = std::min(grid.x(i), grid.extent_x() - grid.x(i));
            if (grid.dim() == 2) {
                dist = std::min({dist, grid.y(j), grid.extent_y() - grid.y(j)});
            }
            d(i, j) = dist;
        }
    }
    return d;
}

VectorField grad_forward(const HeightField& u) {
    const Grid& g = u.grid;
    VectorField p(g);
    const double inv_dx = 1.0 / g.dx();
    if (g.dim() == 1) {
        for (int i = -1; i < g.nx(); ++i) {
            p.x[g.edge_index(i)] = (u.at(i + 1) - u.at(i)) * inv_dx;
        }
        return p;
    }
    const double inv_dy = 1.0 / g.dy();
    for (int j = -1; j < g.ny(); ++j) {
        for (int i = -1; i < g.nx(); ++i) {
            const std::size_t e = g.edge_index(i, j);
            const double c = u.at(i, j);
            p.x[e] = (u.at(i + 1, j) - c) * inv_dx;
            p.y[e] = (u.at(i, j + 1) - c) * inv_dy;
        }
    }
    return p;
}

HeightField div_backward(const VectorField& p) {
    const Grid& g = p.grid;
    HeightField d(g);
    const double inv_dx = 1.0 / g.dx();
    if (g.dim() == 1) {
        for (int i = 0; i < g.nx(); ++i) {
            d(i) = (p.x[g.edge_index(i)] - p.x[g.edge_index(i - 1)]) * inv_dx;
        }
        return d;
    }
    const double inv_dy = 1.0 / g.dy();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t e = g.edge_index(i, j);
            d(i, j) = (p.x[e] - p.x[g.edge_index(i - 1, j)]) * inv_dx +
                      (p.y[e] - p.y[g.edge_index(i, j - 1)]) * inv_dy;
        }
    }
    return d;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double dot(const VectorField& a, const VectorField& b) {
    return dot(a.x, b.x) + dot(a.y, b.y);
}

double max_slope(const HeightField& u) {
    const VectorField g = grad_forward(u);
    double m = 0.0;
    for (std::size_t e = 0; e < g.x.size(); ++e) m = std::max(m, g.magnitude(e));
    return m;
}

double constraint_violation(const HeightField& u, double lambda) {
    double worst = std::max(0.0, max_slope(u) - lambda);
    const HeightField d = dist_to_boundary(u.grid);
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        worst = std::max(worst, std::abs(u.values[k]) - lambda * d.values[k]);
    }
    return worst;
}

bool admissible(const HeightField& u, double lambda, double tol) {
    return u.finite() && constraint_violation(u, lambda) <= tol;
}

double mass(const HeightField& u) {
    double s = 0.0;
    for (double v : u.values) s += v;
    return s * u.grid.cell_volume();
}

double norm_l1(const HeightField& a, const HeightField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += std::abs(a.values[k] - b.values[k]);
    return s * a.grid.cell_volume();
}

double norm_l2(const HeightField& a, const HeightField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double d = a.values[k] - b.values[k];
        s += d * d;
    }
    return std::sqrt(s * a.grid.cell_volume());
}

double norm_linf(const HeightField& a, const HeightField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        s = std::max(s, std::abs(a.values[k] - b.values[k]));
    }
    return s;
}

}  // namespace dunesim
