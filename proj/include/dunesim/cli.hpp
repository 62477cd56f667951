#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dunesim/config.hpp"
#include "dunesim/stepper.hpp"

namespace dunesim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Environment variable that overrides the configured output directory (--out wins over it).
inline constexpr const char* kOutDirEnv = "DUNESIM_OUT_DIR";

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tol = 0.0;
    bool pass = true;
    std::string note;
};

/// Admissibility, time ordering, complementarity and VI residual checks on a trajectory.
std::vector<CheckResult> verify_suite(const Trajectory& traj, const RunConfig& config);

/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace dunesim
