#pragma once

#include <string>

namespace dunesim {

/// Wind-response function H : R -> R+ applied to the nonlocal windward slope.
struct HProfile {
    enum class Kind { zero, constant, smooth_ramp, erf_smoothed };

    Kind kind = Kind::zero;
    /// constant: the value c >= 0; erf_smoothed: epsilon in (0, 1); unused otherwise.
    double param = 0.0;

    static HProfile zero() { return {Kind::zero, 0.0}; }
    static HProfile constant(double c);
    /// r+ / sqrt(1 + r^2): grains slow down on steep windward faces.
    static HProfile smooth_ramp() { return {Kind::smooth_ramp, 0.0}; }
    /// Continuous approximation of the indicator of R+, smoothing width epsilon.
    static HProfile erf_smoothed(double epsilon);

    std::string name() const;
};

/// Flux-height coupling gamma : R+ -> R+ with gamma(0) = 0.
struct GammaProfile {
    enum class Kind { zero, identity, scaled_identity, saturating };

    Kind kind = Kind::identity;
    double a = 1.0;
    double b = 1.0;

    static GammaProfile zero() { return {Kind::zero, 0.0, 0.0}; }
    static GammaProfile identity() { return {Kind::identity, 1.0, 0.0}; }
    static GammaProfile scaled_identity(double a);
    /// a u / (1 + u / b): linear for small heights, bounded by a b.
    static GammaProfile saturating(double a, double b);

    std::string name() const;
};

double h_eval(const HProfile& profile, double slope);
/// Supremum of H over R.
double h_sup(const HProfile& profile);
double lipschitz_bound(const HProfile& profile);

/// Negative heights are treated as 0, so gamma_eval(p, u) = 0 for u <= 0.
double gamma_eval(const GammaProfile& profile, double height);
/// Supremum of gamma on [0, max_height]; every profile is nondecreasing.
double gamma_sup(const GammaProfile& profile, double max_height);
double lipschitz_bound(const GammaProfile& profile);

}  // namespace dunesim
