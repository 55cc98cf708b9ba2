#pragma once

/// @file cli.hpp
/// @brief Command-line entry point

namespace pinflow {

/// Exit codes of cli_main
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_config = 2,
    exit_numerical = 3,
};

/// Runs one subcommand (particles, meanfield, homog, glfield, converge, curve, layer) with
/// --config, --out, --seed, --threads and --verbose; numerical failures also write failure.json
/// into the output directory
int cli_main(int argc, char** argv);

} // namespace pinflow
