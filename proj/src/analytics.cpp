#include "dunesim/analytics.hpp"

#include <stdexcept>

namespace dunesim {

std::optional<int> crest_index(const HeightField& u) {
    const Grid& g = u.grid;
    const int row = g.dim() == 2 ? g.ny() / 2 : 0;
    int best = -1;
    double best_value = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
        if (u(i, row) > best_value) {
            best_value = u(i, row);
            best = i;
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs >= 2 points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("least squares needs distinct abscissae");
    return sxy / sxx;
}

CrestSeries crest_series(const Trajectory& traj) {
    CrestSeries c;
    for (const Snapshot& s : traj.snapshots) {
        const std::optional<int> i = crest_index(s.u);
        const int row = s.u.grid.dim() == 2 ? s.u.grid.ny() / 2 : 0;
        c.times.push_back(s.t);
        c.defined.push_back(i.has_value());
        c.positions.push_back(i ? s.u.grid.x(*i) : 0.0);
        c.heights.push_back(i ? s.u(*i, row) : 0.0);
    }
    const std::size_t n = c.times.size();
    const std::size_t first = n / 2;
    std::vector<double> ts, xs;
    for (std::size_t k = first; k < n; ++k) {
        if (!c.defined[k]) continue;
        ts.push_back(c.times[k]);
        xs.push_back(c.positions[k]);
    }
    if (ts.size() >= 2) {
        c.speed = least_squares_slope(ts, xs);
        c.speed_defined = true;
    }
    return c;
}

}  // namespace dunesim
