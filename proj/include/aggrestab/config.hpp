#pragma once

#include "aggrestab/kernel.hpp"
#include "aggrestab/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aggrestab {

/// Flat key=value run configuration. Lines starting with '#' are comments.
struct RunConfig {
  std::uint64_t seed = 0x5eedULL;
  std::size_t n = 256;
  KernelSpec kernel = KernelSpec::green_closed_form();
  SimConfig sim;
  bool write_snapshots = false;
  std::string output_dir = ".";

  double assumption_tol = 1e-6;
  bool check_boundary = true;
  bool check_mass_neutral = true;
  bool check_norm = true;
  std::vector<double> q_primes{kInf};

  std::vector<double> analyze_M;  // empty: sim.M only
  double M_lo = 1.0;
  double M_hi = 20.0;
  double tol_M = 0.01;

  std::optional<double> mild_T;  // empty: the estimated existence time
  double mild_T_factor = 1.0;
  std::size_t mild_steps = 200;
  std::size_t mild_iterations = 50;
  double mild_tol = 1e-10;
  std::optional<double> C_emp;  // empty: measured by the semigroup probe
};

RunConfig parse_run_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_run_config(const std::string& path);

/// Applies AGGRESTAB_SEED when set.
void apply_environment(RunConfig& config);

}  // namespace aggrestab
