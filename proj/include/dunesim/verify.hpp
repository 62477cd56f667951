#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dunesim/grid.hpp"
#include "dunesim/stepper.hpp"

namespace dunesim {

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

/// T_k(r) = max(min(r, k), -k); k = kNoTruncation gives the identity.
double truncate(double r, double k);
/// Psi_k(r) = int_0^r T_k(s) ds: r^2/2 for |r| <= k, k |r| - k^2/2 beyond.
double truncated_primitive(double r, double k);

/// Phi = sum_x int_0^{u(x)} T_k(s - xi(x)) ds * cell volume, in closed form.
double truncated_energy(const HeightField& u, const HeightField& xi, double k);

/// Admissible test fields xi for the variational inequality.
struct TestFunctionSet {
    std::vector<HeightField> members;
    std::uint64_t seed = 0;
    std::vector<double> truncation_levels;
};

/**
 * Always contains 0, the maximal cone lambda * dist(., boundary) and scaled
 * hats, followed by `count` random members made by smoothing seeded noise and
 * projecting it onto the admissible set. Every member is rescaled, if needed,
 * so that its largest slope does not exceed lambda.
 */
TestFunctionSet make_test_functions(const Grid& grid, double lambda, int count, std::uint64_t seed);

struct VIRecord {
    std::size_t xi_index = 0;
    double k = 0.0;
    std::size_t interval = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    double energy_rate = 0.0;
    double transport_pairing = 0.0;
    double source_pairing = 0.0;
    /// energy_rate - transport_pairing - source_pairing; the inequality asks for <= 0.
    double residual = 0.0;
};

struct VIReport {
    std::vector<VIRecord> records;
    double worst = -std::numeric_limits<double>::infinity();
    double tol = 0.0;
    bool pass = true;
};

/**
 * Residuals of the truncated variational inequality on consecutive snapshots
 * (t_n, t_{n+1}):
 *   (Phi(t_{n+1}) - Phi(t_n)) / (t_{n+1} - t_n)
 *     - sum gamma(u_n) H(d_x K * u_n) d_x^+ T_k(u_n - xi) vol
 *     - sum f(t_n) T_k(u_n - xi) vol.
 * k = kNoTruncation evaluates the untruncated form with 1/2 |u - xi|^2.
 */
std::vector<VIRecord> vi_residual(const Trajectory& traj, const HeightField& xi, double k);

/// vi_residual over every member and truncation level of `tests`.
VIReport vi_report(const Trajectory& traj, const TestFunctionSet& tests, double tol);

struct ComplementarityRecord {
    std::size_t snapshot = 0;
    double t = 0.0;
    /// sum m * max(0, lambda - |grad u|) * vol
    double product_sum = 0.0;
    double product_max = 0.0;
};

struct ComplementarityReport {
    std::vector<ComplementarityRecord> records;
    double worst = 0.0;
    double tol = 0.0;
    bool pass = true;
};

ComplementarityReport complementarity_report(const Trajectory& traj, double tol = 1e-6);

/// Edge nodes with m > m_floor, together with whether each sits on the
/// constraint (|grad u| >= lambda - slack).
struct ActiveSet {
    std::vector<std::size_t> edges;
    std::vector<bool> saturated;
};
ActiveSet active_set(const HeightField& u, const MultiplierField& m, double lambda, double m_floor, double slack);

/// Constant of the L1 stability estimate, assembled from the Lipschitz bounds
/// of gamma and H, the repose slope, and the kernel derivative norms.
double gronwall_constant(const Grid& grid, const ModelParams& params);

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> distance;  // L1 or L2 per `norm`
    std::vector<double> envelope;  // d_0 exp(C t) (1 + env_tol)
    double rate = 0.0;
    bool pass = true;
};

enum class DistanceNorm { l1, l2 };

/**
 * Distance series between two trajectories of the same model. With
 * DistanceNorm::l1 the series is compared against d_0 exp(C t) (1 + env_tol).
 * With DistanceNorm::l2 the check is monotonicity: d_{n+1} <= d_n + env_tol.
 * Throws std::invalid_argument when the models or snapshot times differ.
 */
ContractionReport contraction_report(const Trajectory& a, const Trajectory& b, double rate, double env_tol,
                                     DistanceNorm norm = DistanceNorm::l1);

}  // namespace dunesim
