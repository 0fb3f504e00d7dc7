#pragma once

#include <memory>
#include <string>

#include "config.hpp"
#include "fcsmpc/fcsmpc.h"

namespace fcsmpc_cli {

/// Raised when a library call fails; carries the fcsmpc status for the exit
/// code mapping.
class ApiError : public std::runtime_error {
 public:
  ApiError(fcsmpc_status status, const std::string& what)
      : std::runtime_error(what), status_(status) {}

  fcsmpc_status status() const noexcept { return status_; }

 private:
  fcsmpc_status status_;
};

/// Process exit codes: 0 success, 2 validation/dimension, 3 numerical
/// (singular or unstable), 4 infeasible, 5 capacity, 6 io, 1 internal.
int exit_code_of(fcsmpc_status status);

struct CommandOptions {
  std::string out_dir;      // overrides config.output.dir when non-empty
  std::string solver;       // overrides mpc.solver when non-empty
  bool quiet = false;
};

/// Each command returns the process exit code and prints a one-line summary
/// (unless quiet). Artifacts land in the configured output directory.
int cmd_discretize(const RunConfig& config, const CommandOptions& options);
int cmd_limit_cycle(const RunConfig& config, const CommandOptions& options);
int cmd_terminal_cost(const RunConfig& config, const CommandOptions& options);
int cmd_simulate(const RunConfig& config, const CommandOptions& options);
int cmd_compare(const RunConfig& config, const CommandOptions& options);

}  // namespace fcsmpc_cli
