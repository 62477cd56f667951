#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dunesim {

/// How the slope constraint |grad u| <= lambda is measured at a node.
/// isotropic: Euclidean norm of the forward-difference gradient.
/// anisotropic: each axis component separately (max norm).
/// Both coincide in 1D.
enum class GradientNorm { isotropic, anisotropic };

/**
 * Uniform rectangular grid on [0, Lx] (x [0, Ly]) with Dirichlet zero boundary.
 *
 * Only interior nodes are stored. Node (i, j) sits at ((i+1) dx, (j+1) dy)
 * for 0 <= i < nx, 0 <= j < ny; boundary nodes are implicit and carry 0.
 * Fields are stored row-major with x fastest: index = j * nx + i.
 *
 * Gradients live on the "edge layout": the interior nodes extended by the
 * low-side boundary layer, i.e. i in [-1, nx-1] and j in [-1, ny-1] (2D),
 * so that every forward difference touching the boundary is represented.
 */
class Grid {
public:
    static Grid make(int dim, std::array<double, 2> extents, std::array<int, 2> counts,
                     GradientNorm norm = GradientNorm::isotropic);
    static Grid make_1d(double extent, int count) { return make(1, {extent, 0.0}, {count, 1}); }

    int dim() const { return dim_; }
    int nx() const { return counts_[0]; }
    int ny() const { return dim_ == 2 ? counts_[1] : 1; }
    double extent_x() const { return extents_[0]; }
    double extent_y() const { return extents_[1]; }
    double dx() const { return spacing_[0]; }
    double dy() const { return spacing_[1]; }
    GradientNorm norm() const { return norm_; }

    std::size_t size() const { return static_cast<std::size_t>(nx()) * ny(); }
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * nx() + i; }
    double x(int i) const { return (i + 1) * dx(); }
    double y(int j) const { return dim_ == 2 ? (j + 1) * dy() : 0.0; }

    /// dx in 1D, dx*dy in 2D.
    double cell_volume() const { return dim_ == 2 ? dx() * dy() : dx(); }
    /// Diameter of the domain (length in 1D, diagonal in 2D).
    double diameter() const;

    // Edge layout: (nx+1) x (ny+1) in 2D, (nx+1) in 1D.
    int edge_nx() const { return nx() + 1; }
    int edge_ny() const { return dim_ == 2 ? ny() + 1 : 1; }
    std::size_t edge_size() const { return static_cast<std::size_t>(edge_nx()) * edge_ny(); }
    /// i in [-1, nx-1]; j in [-1, ny-1] in 2D, j = 0 in 1D.
    std::size_t edge_index(int i, int j = 0) const {
        const int jj = dim_ == 2 ? j + 1 : j;
        return static_cast<std::size_t>(jj) * edge_nx() + (i + 1);
    }

    bool same_shape(const Grid& other) const;

private:
    int dim_ = 1;
    std::array<double, 2> extents_{};
    std::array<int, 2> counts_{};
    std::array<double, 2> spacing_{};
    GradientNorm norm_ = GradientNorm::isotropic;
};

/// Heights u (meters) at the interior nodes of a grid.
struct HeightField {
    Grid grid;
    std::vector<double> values;

    HeightField() = default;
    explicit HeightField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    HeightField(const Grid& g, std::vector<double> v);

    double& operator()(int i, int j = 0) { return values[grid.index(i, j)]; }
    double operator()(int i, int j = 0) const { return values[grid.index(i, j)]; }
    /// Value with the Dirichlet ghost convention: 0 outside the interior.
    double at(int i, int j = 0) const;

    bool finite() const;
};

/// Per-edge-node vector field (slopes); `y` is empty in 1D.
struct VectorField {
    Grid grid;
    std::vector<double> x;
    std::vector<double> y;

    VectorField() = default;
    explicit VectorField(const Grid& g);

    /// Norm of the vector at edge node e, measured per grid.norm().
    double magnitude(std::size_t e) const;
};

/// Per-node Euclidean distance to the boundary of the rectangle.
HeightField dist_to_boundary(const Grid& grid);

/// Forward differences on the zero-extended field, on the edge layout.
VectorField grad_forward(const HeightField& u);

/// Negative adjoint of grad_forward: <grad u, p> = -<u, div p> in plain sums.
HeightField div_backward(const VectorField& p);

/// Plain (unweighted) inner products.
double dot(std::span<const double> a, std::span<const double> b);
double dot(const VectorField& a, const VectorField& b);

/// Largest amount by which u leaves the admissible set: the max over edge
/// nodes of (|grad u| - lambda)+ and over interior nodes of (|u| - lambda*dist)+.
double constraint_violation(const HeightField& u, double lambda);
/// Largest slope magnitude |grad u| over the edge layout.
double max_slope(const HeightField& u);
/// Membership in the lambda-Lipschitz cone with zero boundary values.
bool admissible(const HeightField& u, double lambda, double tol = 1e-8);

/// Sum of u * cell volume.
double mass(const HeightField& u);
double norm_l1(const HeightField& a, const HeightField& b);
double norm_l2(const HeightField& a, const HeightField& b);
double norm_linf(const HeightField& a, const HeightField& b);

}  // namespace dunesim
