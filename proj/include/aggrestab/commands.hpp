#pragma once

#include "aggrestab/config.hpp"
#include "aggrestab/error.hpp"

#include <iosfwd>
#include <string>

namespace aggrestab {

enum class ExitCode : int {
  ok = 0,
  validation_failed = 2,
  scheme_failure = 3,
  non_contraction = 4,
  unusable_kernel = 5,
  usage = 64,
  io = 74,
};

ExitCode exit_code_for(ErrorCode code);

/// Runs one subcommand, writing its files into out_dir. Errors propagate as aggrestab::Error.
ExitCode run_command(const std::string& name, const RunConfig& config, const std::string& out_dir, unsigned jobs,
                     std::ostream& diagnostics);

bool is_command(const std::string& name);

}  // namespace aggrestab
