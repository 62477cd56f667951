#include "dunesim/nonlocal.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>
#include <fmt/format.h>

namespace dunesim {

std::string to_string(KernelProfile profile) {
    switch (profile) {
        case KernelProfile::box: return "box";
        case KernelProfile::triangle: return "triangle";
        case KernelProfile::cosine_bump: return "cosine_bump";
    }
    return "unknown";
}

KernelProfile kernel_profile_from_string(const std::string& name) {
    if (name == "box") return KernelProfile::box;
    if (name == "triangle") return KernelProfile::triangle;
    if (name == "cosine_bump") return KernelProfile::cosine_bump;
    throw std::invalid_argument(fmt::format("unknown kernel profile '{}'", name));
}

double DiscreteKernel::weight(int k) const {
    const int r = half_width();
    if (k < -r || k > r) return 0.0;
    return weights[static_cast<std::size_t>(k + r)];
}

double DiscreteKernel::derivative_l1() const {
    const int r = half_width();
    double s = 0.0;
    for (int k = -r - 1; k <= r; ++k) s += std::abs(weight(k + 1) - weight(k));
    return s;
}

double DiscreteKernel::second_derivative_l1() const {
    const int r = half_width();
    double s = 0.0;
    for (int k = -r - 1; k <= r + 1; ++k) {
        s += std::abs(weight(k + 1) - 2.0 * weight(k) + weight(k - 1));
    }
    return s / spacing;
}

namespace {

// Unnormalized profile on the reference support (-1, 1).
double reference_profile(KernelProfile profile, double s) {
    const double a = std::abs(s);
    if (a >= 1.0) return 0.0;
    switch (profile) {
        case KernelProfile::box: return 1.0;
        case KernelProfile::triangle: return 1.0 - a;
        case KernelProfile::cosine_bump: return 0.5 * (1.0 + std::cos(std::numbers::pi * a));
    }
    return 0.0;
}

void check_spacing(const HeightField& u, const DiscreteKernel& kernel) {
    if (std::abs(kernel.spacing - u.grid.dx()) > 1e-12 * u.grid.dx()) {
        throw std::invalid_argument(fmt::format(
            "kernel was built for dx={} but the grid has dx={}", kernel.spacing, u.grid.dx()));
    }
}

// FFTW's planner is not reentrant; sweeps run simulations on several threads.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Linear convolution of `signal` with `taps` via real-to-complex transforms.
std::vector<double> fft_convolve(const std::vector<double>& signal, const std::vector<double>& taps) {
    const std::size_t n = signal.size() + taps.size() - 1;
    const std::size_t nc = n / 2 + 1;
    std::vector<double> a(n, 0.0), b(n, 0.0), out(n, 0.0);
    std::copy(signal.begin(), signal.end(), a.begin());
    std::copy(taps.begin(), taps.end(), b.begin());
    std::vector<std::complex<double>> fa(nc), fb(nc);

    fftw_plan pa, pb, pinv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), a.data(),
                                  reinterpret_cast<fftw_complex*>(fa.data()), FFTW_ESTIMATE | FFTW_UNALIGNED);
        pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), b.data(),
                                  reinterpret_cast<fftw_complex*>(fb.data()), FFTW_ESTIMATE | FFTW_UNALIGNED);
        pinv = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(fa.data()),
                                    out.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(pa);
    fftw_execute(pb);
    for (std::size_t k = 0; k < nc; ++k) fa[k] *= fb[k];
    fftw_execute(pinv);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pinv);
    }
    for (double& v : out) v /= static_cast<double>(n);
    return out;
}

}  // namespace

DiscreteKernel build_kernel(KernelProfile profile, double radius, double dx) {
    if (!(dx > 0.0)) throw std::invalid_argument(fmt::format("kernel spacing must be positive, got {}", dx));
    if (!(radius >= dx * (1.0 - 1e-12))) {
        throw std::invalid_argument(
            fmt::format("kernel radius {} is smaller than the grid spacing {}", radius, dx));
    }
    // Offsets strictly inside the support; the relative slack keeps radius = m dx exclusive.
    int half = 0;
    while ((half + 1) * dx < radius * (1.0 - 1e-12)) ++half;

    DiscreteKernel k;
    k.profile = profile;
    k.radius = radius;
    k.spacing = dx;
    k.weights.resize(static_cast<std::size_t>(2 * half + 1));
    double total = 0.0;
    for (int o = -half; o <= half; ++o) {
        const double w = reference_profile(profile, o * dx / radius);
        k.weights[static_cast<std::size_t>(o + half)] = w;
        total += w;
    }
    for (double& w : k.weights) w /= total * dx;
    // Enforce exact symmetry after the division.
    for (int o = 1; o <= half; ++o) {
        k.weights[static_cast<std::size_t>(half - o)] = k.weights[static_cast<std::size_t>(half + o)];
    }
    return k;
}

HeightField nonlocal_slope(const HeightField& u, const DiscreteKernel& kernel, ConvolutionMethod method) {
    check_spacing(u, kernel);
    const Grid& g = u.grid;
    const int nx = g.nx();
    const int r = kernel.half_width();
    const double dx = g.dx();
    const bool use_fft = method == ConvolutionMethod::fft ||
                         (method == ConvolutionMethod::automatic && 2 * r + 1 > kFftWidthThreshold);

    HeightField s(g);
    // Forward differences d[m + 1] for m in [-1, nx - 1].
    std::vector<double> d(static_cast<std::size_t>(nx + 1));
    for (int j = 0; j < g.ny(); ++j) {
        for (int m = -1; m < nx; ++m) {
            d[static_cast<std::size_t>(m + 1)] = (u.at(m + 1, j) - u.at(m, j)) / dx;
        }
        if (use_fft) {
            const std::vector<double> c = fft_convolve(d, kernel.weights);
            for (int i = 0; i < nx; ++i) s(i, j) = c[static_cast<std::size_t>(i + 1 + r)] * dx;
            continue;
        }
        for (int i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (int k = -r; k <= r; ++k) {
                const int m = i - k;
                if (m < -1 || m >= nx) continue;
                acc += kernel.weights[static_cast<std::size_t>(k + r)] * d[static_cast<std::size_t>(m + 1)];
            }
            s(i, j) = acc * dx;
        }
    }
    return s;
}

HeightField nonlocal_slope_kernel_derivative(const HeightField& u, const DiscreteKernel& kernel) {
    check_spacing(u, kernel);
    const Grid& g = u.grid;
    const int r = kernel.half_width();
    HeightField s(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            double acc = 0.0;
            for (int jj = std::max(0, i - r); jj <= std::min(g.nx() - 1, i + r + 1); ++jj) {
                const int k = i - jj;
                acc += u(jj, j) * (kernel.weight(k + 1) - kernel.weight(k));
            }
            s(i, j) = acc;
        }
    }
    return s;
}

}  // namespace dunesim
