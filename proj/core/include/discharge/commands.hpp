/// @file commands.hpp
/// @brief Subcommand dispatch for the discharge_sim executable.
#pragma once

namespace discharge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// discharge_sim {run, galerkin, msweep, verify, tail, dependence} --config PATH
/// [--out DIR] [--levels LIST] [--delta X] [--threshold X].
int run_command(int argc, const char* const* argv);

}  // namespace discharge
