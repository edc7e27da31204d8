#include "aggrestab/error.hpp"

namespace aggrestab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid parameter";
    case ErrorCode::singularity: return "kernel singularity";
    case ErrorCode::grid_mismatch: return "grid mismatch";
    case ErrorCode::convergence: return "convergence failure";
    case ErrorCode::unsupported_kernel: return "unsupported kernel";
    case ErrorCode::rejected_step: return "rejected step";
    case ErrorCode::scheme_failure: return "scheme failure";
    case ErrorCode::no_existence_time: return "no existence time";
    case ErrorCode::non_contraction: return "non-contraction";
    case ErrorCode::invalid_bracket: return "invalid bracket";
    case ErrorCode::fit_failure: return "fit failure";
    case ErrorCode::load: return "load error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::config: return "configuration error";
  }
  return "unknown error";
}

}  // namespace aggrestab
