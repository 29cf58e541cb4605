#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ddelast/errors.hpp"

namespace ddelast::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitBudget = 4,
};

int exit_code_for(ErrorCode code);

/// Entry point of the `ddelast` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddelast::cli
