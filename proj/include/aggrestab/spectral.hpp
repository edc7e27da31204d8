#pragma once

#include "aggrestab/grid.hpp"
#include "aggrestab/kernel.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace aggrestab {

/// L phi = -Lap phi + M div(grad K(phi)) as a dense matrix on cell values.
struct LinearizedOperator {
  Grid1D grid;
  std::shared_ptr<const KernelMatrices> km;
  double M = 0.0;
  Eigen::MatrixXd matrix;

  Eigen::MatrixXd symmetric_part() const { return 0.5 * (matrix + matrix.transpose()); }
};

LinearizedOperator assemble_linearized(const Grid1D& grid, std::shared_ptr<const KernelMatrices> km, double M);

/// J(phi, psi) = int grad phi . grad psi - M int grad K(phi) . grad psi over interior faces.
double bilinear_form(const LinearizedOperator& lop, const Field& phi, const Field& psi);

struct EigenPair {
  double lambda = 0.0;
  Field mode;        // unit L2 norm, zero mean, sign fixed by <mode, w_1> >= 0
  double residual;   // max |J_sym(mode, e_j) - lambda <mode, e_j>| over zero-mean test directions
};

/// Minimum of J(phi,phi)/|phi|^2 over zero-mean fields via the symmetric part restricted to that subspace.
EigenPair principal_eigenpair(const LinearizedOperator& lop);

/// A = int int K(x,y) w_1(y) w_1(x) dx dy.
double compute_A(const KernelMatrices& km, const SpectralBasis& basis);

enum class Verdict { linearly_stable_sufficient, linearly_unstable, inconclusive };
const char* to_string(Verdict v);

struct StabilityReport {
  double M = 0.0;
  double lambda1 = 0.0;           // pi^2
  double lambda1_discrete = 0.0;  // symbol of the three-point Laplacian
  double grad_norm = 0.0;         // |grad K|_{L2 -> L2}
  double hs_norm = 0.0;           // Hilbert-Schmidt norm of d_xK
  double A = 0.0;
  double critical_mass_instability = 0.0;  // 1/A, NaN unless A > 0
  double stability_bound_mass = 0.0;       // sqrt(lambda1)/grad_norm
  double stability_margin = 0.0;           // sqrt(lambda1) - M grad_norm
  Verdict verdict = Verdict::inconclusive;
  double principal_eigenvalue = 0.0;
  Field principal_mode;
  bool thresholds_overlap = false;   // both sufficient conditions hold at once
  bool eigen_sign_mismatch = false;  // verdict disagrees with the sign of the principal eigenvalue
};

StabilityReport stability_verdict(const KernelSpec& spec, const Grid1D& grid, double M);
StabilityReport stability_verdict(std::shared_ptr<const KernelMatrices> km, double M);

std::string to_key_value(const StabilityReport& r);
inline constexpr const char* kStabilityCsvHeader =
    "M,lambda1,grad_norm,A,M_crit_instab,M_bound_stab,principal_eig,verdict";
std::string to_csv_row(const StabilityReport& r);

}  // namespace aggrestab
