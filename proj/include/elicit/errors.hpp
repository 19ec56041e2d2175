#pragma once

#include <stdexcept>
#include <string>

namespace elicit {

/// Invalid experiment configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A combinatorial enumeration would exceed its configured cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap, or its input was infeasible.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Process exit codes used by the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitCapacity = 3,
  kExitSolver = 4,
};

}  // namespace elicit
