#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace coldstart {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

/// Runs the command-line driver. `args` excludes the program name.
/// Subcommands: ingest-check, train, pair, cf-build, recommend, eval,
/// pipeline and synth. Every option may also come from a flat key=value file
/// given with --config or from a COLDSTART_<KEY> environment variable
/// (key upper-cased, dashes as underscores); flags win over the environment,
/// which wins over the file.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace coldstart
