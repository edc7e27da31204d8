#pragma once

#include "aggrestab/grid.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace aggrestab {

enum class KernelVariant { green_closed_form, green_series, gaussian, power_law_gradient, tabulated };

const char* to_string(KernelVariant v);

/// Samples of a kernel on a fixed grid: K at (centre, centre) and d_xK at (face, centre).
struct TabulatedKernel {
  Grid1D grid;
  Eigen::MatrixXd k_centers;    // n x n
  Eigen::MatrixXd gradk_faces;  // (n+1) x n
};

/// An aggregation kernel K(x,y) on [0,1]^2. Immutable value type.
class KernelSpec {
 public:
  /// Neumann Green function of -d^2/dx^2 + 1 in closed form.
  static KernelSpec green_closed_form();
  /// Neumann Green function of -d^2/dx^2 + a as a cosine series truncated at m terms.
  static KernelSpec green_series(double a, int m = 4096);
  static KernelSpec gaussian(double sigma, double c = 1.0);
  /// d_xK = -sign(x-y) (|x-y| + delta)^(-alpha).
  static KernelSpec power_law_gradient(double alpha, double delta);
  static KernelSpec tabulated(TabulatedKernel table);
  /// The identically zero kernel.
  static KernelSpec zero();

  KernelVariant variant() const noexcept { return variant_; }
  double scale() const noexcept { return scale_; }
  /// c*K for the same variant.
  KernelSpec scaled(double c) const;

  double a() const noexcept { return a_; }
  int series_terms() const noexcept { return m_; }
  double sigma() const noexcept { return sigma_; }
  double gaussian_c() const noexcept { return c_; }
  double alpha() const noexcept { return alpha_; }
  double delta() const noexcept { return delta_; }
  const TabulatedKernel* table() const noexcept { return table_.get(); }

  double eval(double x, double y) const;
  /// d_xK(x,y). At x == y the one-sided limits are averaged where they are finite.
  double grad_x(double x, double y) const;

  /// True when K(x,y) = K(y,x) by construction (all analytic variants).
  bool symmetric_by_construction() const noexcept { return variant_ != KernelVariant::tabulated; }

  std::string describe() const;

 private:
  KernelSpec() = default;

  KernelVariant variant_ = KernelVariant::green_closed_form;
  double scale_ = 1.0;
  double a_ = 1.0;
  int m_ = 0;
  double sigma_ = 0.0;
  double c_ = 1.0;
  double alpha_ = 0.0;
  double delta_ = 0.0;
  std::shared_ptr<const TabulatedKernel> table_;
};

/// Reads `x,y,k,gradk` rows (row-major over cell centres) for the given grid.
KernelSpec load_tabulated_csv(const std::string& path, const Grid1D& grid);
void write_tabulated_csv(const std::string& path, const KernelSpec& spec, const Grid1D& grid);

/// Kernel sampled on a grid; the quadrature weight h is applied by apply/apply_grad.
struct KernelMatrices {
  Grid1D grid;
  Eigen::MatrixXd k_centers;    // K(x_i, y_j), diagonal holds the cell average of K(x_i, .)
  Eigen::MatrixXd gradk_faces;  // d_xK(x_{f}, y_j), faces f = 0..n
};

KernelMatrices assemble(const KernelSpec& spec, const Grid1D& grid);

Field apply(const KernelMatrices& km, const Field& u);
FaceVector apply_grad(const KernelMatrices& km, const Field& u);

struct KernelNormEstimate {
  double q_prime = kInf;
  double value = 0.0;  // +inf when the trend diverges
  bool infinite = false;
  bool ambiguous = false;
  /// Per-doubling growth of the integral of |d_xK|^q' (of the sup when q' = inf).
  double growth_ratio = 1.0;
  /// Per-doubling growth exponent of the norm itself.
  double norm_exponent = 0.0;
  std::vector<std::pair<std::size_t, double>> refinement_trend;
};

/// ess sup_x |d_xK(x,.)|_{q'} + ess sup_y |d_xK(.,y)|_{q'} estimated on each refinement level.
KernelNormEstimate norm_inf_qprime(const KernelSpec& spec, double q_prime, const std::vector<std::size_t>& levels);

/// Same estimate from already-assembled matrices (single level).
double norm_inf_qprime_discrete(const KernelMatrices& km, double q_prime);

/// Hilbert-Schmidt norm of d_xK on [0,1]^2.
double hilbert_schmidt_norm(const KernelMatrices& km);

struct ValidationReport {
  double tol = 0.0;
  double boundary_residual = 0.0;      // max |d_xK| on boundary faces
  bool boundary_ok = false;
  double mass_neutral_residual = 0.0;  // max over interior faces of |h sum_j d_xK|
  bool mass_neutral_ok = false;
  std::vector<KernelNormEstimate> norms;
  bool norm_ok = false;
  double symmetry_residual = 0.0;
  double hs_norm = 0.0;
};

ValidationReport validate_assumptions(const KernelSpec& spec, const Grid1D& grid, double tol,
                                      const std::vector<double>& q_primes = {kInf});

/// Largest singular value of u -> apply_grad(km, u) in L2 by power iteration.
double l2_operator_norm(const KernelMatrices& km, bool restrict_zero_mean, std::uint64_t seed = 0x5eedULL);

enum class Singularity { mildly_singular, strongly_singular, undetermined };
const char* to_string(Singularity s);

struct Classification {
  Singularity kind = Singularity::undetermined;
  double critical_q_prime = kInf;
  std::vector<KernelNormEstimate> probes;
};

inline const std::vector<std::size_t> kDefaultLevels{64, 128, 256, 512};

Classification classify(const KernelSpec& spec, const std::vector<std::size_t>& levels = kDefaultLevels);

}  // namespace aggrestab
