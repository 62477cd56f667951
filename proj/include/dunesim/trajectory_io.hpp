#pragma once

#include <filesystem>
#include <string>

#include "dunesim/config.hpp"
#include "dunesim/stepper.hpp"

namespace dunesim {

/**
 * Writes `dir/manifest.json` and one `snapshot_NNNNN.csv` per snapshot.
 *
 * CSV columns are `x,u,m` (1D) or `x,y,u,m` (2D). Rows cover the edge layout
 * (interior nodes plus the low-side boundary layer) with j outer and i inner,
 * so the multiplier is stored in full; boundary rows carry u = 0. Floats are
 * written with 17 significant digits and read back bit-exactly.
 * Throws std::runtime_error naming the path on I/O failure.
 */
void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir, const RunConfig* config = nullptr);

/// Inverse of write_trajectory. The embedded run config is stored in `config` when given.
Trajectory read_trajectory(const std::filesystem::path& dir, RunConfig* config = nullptr);

std::string snapshot_file_name(std::size_t index);

/// Snapshot CSV text for a single field pair.
std::string snapshot_csv(const HeightField& u, const MultiplierField& m);
/// Parses snapshot CSV text written by snapshot_csv; the grid must match.
Snapshot parse_snapshot_csv(const std::string& text, const Grid& grid, const std::string& origin);

}  // namespace dunesim
