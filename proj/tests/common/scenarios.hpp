#pragma once

// Shared scenario builders for the unit and acceptance suites.

#include "dunesim/config.hpp"
#include "dunesim/stepper.hpp"

namespace scenarios {

inline dunesim::ModelParams wind_params(double lambda = 1.0) {
    dunesim::ModelParams p;
    p.lambda = lambda;
    p.h = dunesim::HProfile::smooth_ramp();
    p.gamma = dunesim::GammaProfile::saturating(1.0, 0.1);
    p.kernel = {dunesim::KernelProfile::triangle, 0.2};
    return p;
}

inline dunesim::ModelParams sandpile_params(double lambda = 1.0) {
    dunesim::ModelParams p;
    p.lambda = lambda;
    p.h = dunesim::HProfile::zero();
    return p;
}

/// Piecewise linear dune with windward slope height/0.2 and lee slope height/0.3.
inline dunesim::HeightField asymmetric_dune(const dunesim::Grid& g, double center = 0.4, double height = 0.1) {
    dunesim::InitialSpec s;
    s.preset = dunesim::InitialSpec::Preset::dune;
    s.center = center;
    s.center_y = 0.5 * g.extent_y();
    s.height = height;
    s.width = 0.2;
    s.lee_width = 0.3;
    return dunesim::make_initial(s, g, 1.0, ".");
}

/// Final time covering `steps` steps of the CFL step.
inline double time_for_steps(const dunesim::Grid& g, const dunesim::ModelParams& p, int steps) {
    return steps * dunesim::cfl_dt(g, p);
}

}  // namespace scenarios
