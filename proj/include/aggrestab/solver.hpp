#pragma once

#include "aggrestab/grid.hpp"
#include "aggrestab/kernel.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace aggrestab {

enum class SimMode { nonlinear, perturbed, linearized };
const char* to_string(SimMode m);
SimMode parse_sim_mode(const std::string& s);

/// Initial datum descriptors: `constant:<M>`, `constant_plus_mode:<M>,<amplitude>,<k>`,
/// `random_zero_mean:<amplitude>,<seed>`, `csv:<path>`.
class InitialDatum {
 public:
  struct Constant { double value; };
  struct ConstantPlusMode { double level; double amplitude; std::size_t k; };
  struct RandomZeroMean { double amplitude; std::uint64_t seed; };
  struct Csv { std::string path; };

  static InitialDatum parse(const std::string& descriptor);
  explicit InitialDatum(std::variant<Constant, ConstantPlusMode, RandomZeroMean, Csv> d) : data_(std::move(d)) {}

  /// The datum as a field; `base` is the level random_zero_mean perturbs around.
  Field build(const Grid1D& grid, double base = 0.0) const;

 private:
  std::variant<Constant, ConstantPlusMode, RandomZeroMean, Csv> data_;
};

/// Zero-mean combination of w_1..w_16 with random coefficients decaying like 1/k, scaled to L2 norm `amplitude`.
Field random_zero_mean_field(const Grid1D& grid, double amplitude, std::uint64_t seed);

struct SimConfig {
  std::size_t n = 256;
  KernelSpec kernel = KernelSpec::green_closed_form();
  SimMode mode = SimMode::nonlinear;
  double M = 0.0;
  double t_end = 1.0;
  std::optional<double> dt;  // empty: auto_dt every step
  std::string initial = "constant:1";
  /// Snapshot spacing in time; zero records every step.
  double output_interval = 0.0;
  /// Nonlinear-mode guards.
  double positivity_tol = 1e-12;
  double mass_tol = 1e-12;
};

struct Diagnostics {
  double mass = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double min = 0.0;
};
Diagnostics diagnose(const Field& f);

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  std::vector<Diagnostics> diagnostics;
  std::size_t steps = 0;

  void record(double t, const Field& f);
};

/// Face transport velocity grad K(state) with zero boundary faces (scaled by M in linearized mode).
FaceVector transport_velocity(const Field& state, SimMode mode, double M, const KernelMatrices& km);

/// min(h / (2 max|V| + 1e-30), 10 h^2).
double auto_dt(const Field& state, const KernelMatrices& km, SimMode mode, double M);

/// One step: explicit upwind transport, backward-Euler diffusion, both in flux form.
Field step_imex(const Field& state, double dt, SimMode mode, double M, const KernelMatrices& km);

Trajectory evolve(const SimConfig& config);
Trajectory evolve(const SimConfig& config, const Field& initial, const std::shared_ptr<const KernelMatrices>& km);

/// Exact discrete Neumann heat flow: c_k -> exp(-lambda_k^disc t) c_k.
Field heat_semigroup(const SpectralBasis& basis, const Field& f, double t);

using ProbeFactory = std::function<Field(const Grid1D&)>;
struct NamedProbe {
  std::string name;
  ProbeFactory make;
};
/// w_1, w_3, a seeded random zero-mean field and a smoothed indicator of [0.3, 0.6].
std::vector<NamedProbe> default_probe_set(std::uint64_t seed);

struct ProbeReport {
  double p = 1.0;
  double q = 1.0;
  double C1 = 0.0;  // sup of the (G1) ratio
  double C2 = 0.0;  // sup of the (G2) ratio
  std::vector<double> per_probe_C1;
  std::vector<double> per_probe_C2;
  std::vector<double> t_grid;
};

std::vector<double> log_time_grid(double t_lo, double t_hi, std::size_t points_per_octave);

ProbeReport semigroup_probe(const Grid1D& grid, const std::vector<NamedProbe>& probes, double p, double q,
                            const std::vector<double>& t_grid);

struct ProbeRefinement {
  ProbeReport coarse;
  ProbeReport refined;  // doubled n and doubled t-grid density
  double change_C1 = 0.0;
  double change_C2 = 0.0;
  bool stable = false;  // both relative changes within `tolerance`
};

ProbeRefinement semigroup_probe_refinement(std::size_t n, const std::vector<NamedProbe>& probes, double p, double q,
                                           double t_lo, double t_hi, std::size_t points_per_octave,
                                           double tolerance = 0.2);

/// Largest T with 4 C T^gamma |grad_x K|_{inf,q'} N(u0) < 1; +inf for a zero kernel norm.
double existence_time(const Field& u0, double kernel_norm, double q, double q_prime, double C_emp);
/// Conjugate exponent q of q'.
double conjugate_exponent(double q_prime);

struct MildSolveOptions {
  std::size_t time_steps = 200;
  std::size_t max_iterations = 50;
  double tol = 1e-10;
  double q = 1.0;  // Lebesgue exponent of the X_T norm
};

struct MildSolveDiagnostics {
  double T_existence = 0.0;  // horizon actually solved on
  double q = 1.0;
  double q_prime = kInf;
  std::vector<double> picard_distances;
  double contraction_ratio = 0.0;
  bool converged = false;
  double yt_norm = 0.0;  // sup_t t^{(1/2)(1-1/q)} |u|_q + sup_t |u|_1 of the final iterate
  Trajectory final_iterate;
  std::vector<std::string> warnings;
};

/// Fixed point u = e^{t Lap} u0 + B(u,u) on a uniform time grid over [0, T].
MildSolveDiagnostics picard_mild_solve(const Field& u0, const std::shared_ptr<const KernelMatrices>& km, double T,
                                       const MildSolveOptions& options = {});

/// X_T distance sup_t |a-b|_1 + sup_t |a-b|_q over matching snapshots.
double xt_distance(const std::vector<Field>& a, const std::vector<Field>& b, double q);

}  // namespace aggrestab
