// Command-line entry: simulate | sweep | trace | compare | validate. Results
// go to CSV files plus a run.meta sidecar that replays the run via --config.
#ifndef HETNET_CLI_HPP
#define HETNET_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace hetnet {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInfeasible = 2, kExitNotConverged = 3 };

/// args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_command(int argc, const char* const* argv);

}  // namespace hetnet

#endif  // HETNET_CLI_HPP
