#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dunesim/grid.hpp"
#include "dunesim/stepper.hpp"

namespace dunesim {

struct GridSpec {
    int dim = 1;
    std::array<double, 2> extents{1.0, 1.0};
    std::array<int, 2> counts{64, 64};
    GradientNorm norm = GradientNorm::isotropic;
};

struct InitialSpec {
    enum class Preset { hump, dune, cone, flat, file };
    Preset preset = Preset::hump;
    double center = 0.5;
    double center_y = 0.5;
    double height = 0.1;
    /// Windward (upwind) half-width of the hump or dune.
    double width = 0.2;
    /// Lee (downwind) half-width; defaults to `width`.
    std::optional<double> lee_width;
    /// cone: fraction of the maximal cone lambda * dist.
    double scale = 1.0;
    std::string file;
};

struct VerifySpec {
    bool enabled = false;
    int test_functions = 8;
    /// Residual tolerance is vi_constant * (dt + dx).
    double vi_constant = 2.0;
    double comp_tol = 1e-6;
};

struct RunConfig {
    GridSpec grid;
    ModelParams model;
    /// Tabulated source file (CSV with columns t,x[,y],f); loaded by prepare_run.
    std::string source_file;
    InitialSpec initial;
    std::string output_dir = "out";
    int snapshot_every = 1;
    VerifySpec verify;
    std::uint64_t seed = 0;
    /// Directory that relative file paths are resolved against.
    std::string base_dir = ".";
};

struct ConfigError {
    int line = 0;
    int column = 0;
    std::string key;
    std::string message;
};

std::string to_string(const ConfigError& e);

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<ConfigError> errors;
    bool ok() const { return errors.empty() && config.has_value(); }
};

/**
 * Parses the INI-style run configuration.
 *
 *   seed = 7              # top-level keys precede any section
 *   [grid]
 *   dim = 1
 *   count_x = 64
 *   [model]
 *   lambda = 1.0
 *   final_time = 0.05
 *
 * Every problem is collected (unknown sections or keys, malformed values,
 * range violations) with its line and column; the parse never stops at the
 * first error. Unknown keys carry a nearest-valid-key suggestion.
 */
ParseResult parse_config(std::string_view text, const std::string& base_dir = ".");

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& config);

/// Section -> key -> canonical value text.
std::map<std::string, std::map<std::string, std::string>> config_entries(const RunConfig& config);

/// Config describing an existing model and grid (initial data left at defaults).
RunConfig config_from_model(const ModelParams& params, const Grid& grid);

/// Every valid "section.key" name ("seed" for top-level keys).
const std::vector<std::string>& valid_config_keys();

/// Levenshtein distance.
std::size_t edit_distance(std::string_view a, std::string_view b);

struct PreparedRun {
    Grid grid;
    ModelParams params;
    HeightField u0;
};

/// Builds the grid and initial data and loads any referenced files.
/// Throws std::invalid_argument (bad values) or std::runtime_error (I/O).
PreparedRun prepare_run(const RunConfig& config);

HeightField make_initial(const InitialSpec& spec, const Grid& grid, double lambda, const std::string& base_dir);

}  // namespace dunesim
