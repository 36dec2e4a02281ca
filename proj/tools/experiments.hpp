#pragma once

#include "run_config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace hyperinv::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

struct Artifact {
  std::string name;     // file name inside the output directory
  std::string content;
};

struct Outcome {
  std::string experiment;
  int code = kOk;
  std::string message;
  std::vector<Artifact> files;
};

// Pure: no file access besides reading run.tensor_file.
Outcome run_experiment(const std::string& name, const RunConfig& c);

// Runs `names` on c.threads workers, then writes every artifact under c.out in name order.
// Returns the largest exit code met.
int run_and_write(const RunConfig& c, const std::vector<std::string>& names, std::ostream& log);

}  // namespace hyperinv::cli
