#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tlsthermo::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitNoConvergence = 3,
  kExitNothingFound = 4,
};

// args excludes the program name. CSV goes to --out when given, else `out`;
// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlsthermo::cli
