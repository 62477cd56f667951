#pragma once

#include <optional>
#include <vector>

#include "dunesim/grid.hpp"
#include "dunesim/stepper.hpp"

namespace dunesim {

/// Column of the maximum height along x (leftmost on ties). 2D fields are
/// read along the centerline row j = ny / 2. Empty when the row has no
/// positive height.
std::optional<int> crest_index(const HeightField& u);

struct CrestSeries {
    std::vector<double> times;
    std::vector<double> positions;  // meters; 0 where undefined
    std::vector<double> heights;
    std::vector<bool> defined;
    /// Least-squares slope of position against time over the last half of the snapshots (m/s).
    double speed = 0.0;
    bool speed_defined = false;
};

CrestSeries crest_series(const Trajectory& traj);

/// Ordinary least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dunesim
