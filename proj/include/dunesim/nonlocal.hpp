#pragma once

#include <string>
#include <vector>

#include "dunesim/grid.hpp"

namespace dunesim {

enum class KernelProfile { box, triangle, cosine_bump };

std::string to_string(KernelProfile profile);
KernelProfile kernel_profile_from_string(const std::string& name);

/**
 * Symmetric, compactly supported averaging stencil along x.
 *
 * weights[half_width() + k] is the weight at offset k * spacing, for
 * |k| <= half_width(). Normalized so that sum(weights) * spacing == 1.
 */
struct DiscreteKernel {
    KernelProfile profile = KernelProfile::triangle;
    double radius = 0.0;
    double spacing = 0.0;
    std::vector<double> weights;

    int half_width() const { return static_cast<int>(weights.size() / 2); }
    /// Weight at offset k; 0 outside the stencil.
    double weight(int k) const;
    /// sum_k |w(k+1) - w(k)|, the discrete L1 norm of dK/dx (1/m).
    double derivative_l1() const;
    /// sum_k |w(k+1) - 2 w(k) + w(k-1)| / spacing, the discrete L1 norm of d2K/dx2 (1/m^2).
    double second_derivative_l1() const;
};

/// Samples the profile at offsets |k dx| < radius and renormalizes to unit mass.
/// Throws std::invalid_argument when radius < dx.
DiscreteKernel build_kernel(KernelProfile profile, double radius, double dx);

enum class ConvolutionMethod { automatic, direct, fft };

/// Kernels wider than this many cells use the FFT path under `automatic`.
inline constexpr int kFftWidthThreshold = 16;

/**
 * (K * d_x u)(x_i) at every interior node: the kernel convolved, row by row,
 * with the forward difference of u extended by zero outside the domain.
 */
HeightField nonlocal_slope(const HeightField& u, const DiscreteKernel& kernel,
                           ConvolutionMethod method = ConvolutionMethod::automatic);

/// The same quantity computed as (d_x K) * u: differences of the kernel weights
/// convolved with the zero-extended heights.
HeightField nonlocal_slope_kernel_derivative(const HeightField& u, const DiscreteKernel& kernel);

}  // namespace dunesim
