#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aggrestab {

enum class ErrorCode {
  invalid_parameter = 1,
  singularity,
  grid_mismatch,
  convergence,
  unsupported_kernel,
  rejected_step,
  scheme_failure,
  no_existence_time,
  non_contraction,
  invalid_bracket,
  fit_failure,
  load,
  io,
  config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by step_imex when dt exceeds the transport CFL bound.
class RejectedStep : public Error {
 public:
  RejectedStep(double dt, double admissible)
      : Error(ErrorCode::rejected_step,
              "time step " + std::to_string(dt) + " exceeds CFL bound " + std::to_string(admissible)),
        admissible_dt_(admissible) {}
  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// Picard iteration hit its cap; carries the successive-iterate distances.
class NonContraction : public Error {
 public:
  NonContraction(const std::string& what, std::vector<double> history)
      : Error(ErrorCode::non_contraction, what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what, ErrorCode code = ErrorCode::invalid_parameter) {
  if (!cond) throw Error(code, what);
}

}  // namespace aggrestab
