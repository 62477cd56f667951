#include "dunesim/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace dunesim {

HProfile HProfile::constant(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument(fmt::format("constant H profile needs c >= 0, got {}", c));
    }
    return {Kind::constant, c};
}

HProfile HProfile::erf_smoothed(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument(
            fmt::format("erf_smoothed H profile needs epsilon in (0, 1), got {}", epsilon));
    }
    return {Kind::erf_smoothed, epsilon};
}

std::string HProfile::name() const {
    switch (kind) {
        case Kind::zero: return "zero";
        case Kind::constant: return "constant";
        case Kind::smooth_ramp: return "smooth_ramp";
        case Kind::erf_smoothed: return "erf_smoothed";
    }
    return "unknown";
}

GammaProfile GammaProfile::scaled_identity(double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
        throw std::invalid_argument(fmt::format("scaled_identity gamma needs a >= 0, got {}", a));
    }
    return {Kind::scaled_identity, a, 0.0};
}

GammaProfile GammaProfile::saturating(double a, double b) {
    if (!(a >= 0.0) || !std::isfinite(a) || !(b > 0.0) || !std::isfinite(b)) {
        throw std::invalid_argument(
            fmt::format("saturating gamma needs a >= 0 and b > 0, got a={} b={}", a, b));
    }
    return {Kind::saturating, a, b};
}

std::string GammaProfile::name() const {
    switch (kind) {
        case Kind::zero: return "zero";
        case Kind::identity: return "identity";
        case Kind::scaled_identity: return "scaled_identity";
        case Kind::saturating: return "saturating";
    }
    return "unknown";
}

namespace {

// H(r) = 1 - (1/sqrt(pi)) * int_{-1/eps}^{-r/sqrt(eps)} exp(-z^2) dz, with the
// finite lower limit kept. The integral equals (sqrt(pi)/2) (erf(b) - erf(a)),
// so H(-inf) = erfc(1/eps)/2 and H(+inf) = 1 + erfc(1/eps)/2 rather than 0 and 1.
double erf_profile(double epsilon, double r) {
    const double lower = -1.0 / epsilon;
    const double upper = -r / std::sqrt(epsilon);
    return 1.0 - 0.5 * (std::erf(upper) - std::erf(lower));
}

}  // namespace

double h_eval(const HProfile& profile, double slope) {
    switch (profile.kind) {
        case HProfile::Kind::zero: return 0.0;
        case HProfile::Kind::constant: return profile.param;
        case HProfile::Kind::smooth_ramp:
            return slope > 0.0 ? slope / std::sqrt(1.0 + slope * slope) : 0.0;
        case HProfile::Kind::erf_smoothed:
            return std::clamp(erf_profile(profile.param, slope), 0.0, h_sup(profile));
    }
    return 0.0;
}

double h_sup(const HProfile& profile) {
    switch (profile.kind) {
        case HProfile::Kind::zero: return 0.0;
        case HProfile::Kind::constant: return profile.param;
        case HProfile::Kind::smooth_ramp: return 1.0;
        case HProfile::Kind::erf_smoothed: return 1.0 + 0.5 * std::erfc(1.0 / profile.param);
    }
    return 0.0;
}

double lipschitz_bound(const HProfile& profile) {
    switch (profile.kind) {
        case HProfile::Kind::zero:
        case HProfile::Kind::constant: return 0.0;
        // d/dr r / sqrt(1 + r^2) = (1 + r^2)^(-3/2), largest at r = 0+.
        case HProfile::Kind::smooth_ramp: return 1.0;
        // H'(r) = exp(-r^2 / eps) / sqrt(pi eps).
        case HProfile::Kind::erf_smoothed:
            return 1.0 / std::sqrt(std::numbers::pi * profile.param);
    }
    return 0.0;
}

double gamma_eval(const GammaProfile& profile, double height) {
    if (!(height > 0.0)) return 0.0;
    switch (profile.kind) {
        case GammaProfile::Kind::zero: return 0.0;
        case GammaProfile::Kind::identity: return height;
        case GammaProfile::Kind::scaled_identity: return profile.a * height;
        case GammaProfile::Kind::saturating:
            return profile.a * height / (1.0 + height / profile.b);
    }
    return 0.0;
}

double gamma_sup(const GammaProfile& profile, double max_height) {
    return gamma_eval(profile, max_height);
}

double lipschitz_bound(const GammaProfile& profile) {
    switch (profile.kind) {
        case GammaProfile::Kind::zero: return 0.0;
        case GammaProfile::Kind::identity: return 1.0;
        case GammaProfile::Kind::scaled_identity:
        case GammaProfile::Kind::saturating: return profile.a;
    }
    return 0.0;
}

}  // namespace dunesim
