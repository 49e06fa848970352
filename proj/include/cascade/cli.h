#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cascade {

inline constexpr const char* kSeedEnvVar = "CASCADE_READOUT_SEED";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,      // bad arguments or domain errors
  kExitNumerical = 3,  // quadrature, filter or simulation failures
};

// Runs one command. `args` excludes the program name. Tables go to `out`
// unless --out is given; diagnostics and progress go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cascade
