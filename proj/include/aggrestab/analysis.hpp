#pragma once

#include "aggrestab/kernel.hpp"
#include "aggrestab/solver.hpp"
#include "aggrestab/spectral.hpp"

#include <limits>
#include <vector>

namespace aggrestab {

enum class RateNorm { l1, l2, linf };
const char* to_string(RateNorm n);

struct RateWindow {
  double t_lo = 0.0;
  double t_hi = std::numeric_limits<double>::infinity();
  double skip_fraction = 0.05;  // leading part of the window dropped as transient
  double floor = 1e-10;         // norms are kept while inside [floor, ceiling] times the first kept norm
  double ceiling = 1e6;
};

struct RateFit {
  double rate = 0.0;  // positive means decay
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples_used = 0;
  bool degenerate = false;  // norm constant over the window
  bool reliable() const { return !degenerate && r_squared >= 0.99; }
};

/// Least-squares slope of log|snapshot - offset| against time.
RateFit fit_rate(const Trajectory& traj, RateNorm norm, double offset = 0.0, const RateWindow& window = {});

struct BisectionStep {
  double M = 0.0;
  double eigenvalue = 0.0;
};

struct ThresholdResult {
  double M_critical = 0.0;
  double M_lo = 0.0;
  double M_hi = 0.0;
  std::vector<BisectionStep> history;
};

/// Bisection on the sign of the principal eigenvalue; the bracket needs a sign change.
ThresholdResult threshold_bisect(const KernelSpec& spec, const Grid1D& grid, double M_lo, double M_hi,
                                 double tol_M);

struct BasinSample {
  double amplitude = 0.0;
  double final_ratio = 0.0;  // |phi(t_end)|_2 / |phi_0|_2
  bool decayed = false;
};

struct BasinProbe {
  double M = 0.0;
  double t_end = 0.0;
  double eta_estimate = 0.0;
  double eta_fail = std::numeric_limits<double>::quiet_NaN();
  bool open_above = false;
  std::vector<BasinSample> history;
};

struct BasinOptions {
  double decay_fraction = 0.01;
  double horizon_factor = 10.0;  // t_end = horizon_factor / expected rate
  double max_t_end = 50.0;
};

BasinProbe basin_probe(const KernelSpec& spec, const Grid1D& grid, double M, double amplitude_hi, std::size_t steps,
                       const BasinOptions& options = {});

struct CrossValidation {
  double max_discrepancy = 0.0;
  double discrepancy_at_half = 0.0;  // L-inf difference at the shared time closest to T/2
  double time_at_half = 0.0;
  MildSolveDiagnostics mild;
};

/// Evolve and the Picard mild solver from the same datum, compared at shared output times.
CrossValidation cross_validate(const Field& u0, const KernelSpec& spec, double T,
                               const MildSolveOptions& mild_options = {}, std::optional<double> evolve_dt = {});

}  // namespace aggrestab
