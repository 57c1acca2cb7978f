#pragma once

#include <functional>
#include <string>
#include <vector>

#include "output.hpp"
#include "run_config.hpp"

namespace mallows::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsageError = 2, kResourceCap = 3 };

struct CommandResult {
  std::vector<OutputFile> files;  // the first one goes to stdout without --out
  int exit_code = kPass;
};

struct CommandInfo {
  std::string name;
  std::string description;
  std::function<CommandResult(const RunConfig&)> run;
};

const std::vector<CommandInfo>& commands();

}  // namespace mallows::cli
