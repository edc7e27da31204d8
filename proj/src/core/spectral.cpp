#include "aggrestab/spectral.hpp"

#include "aggrestab/error.hpp"
#include "aggrestab/format.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace aggrestab {

namespace {

// Faces of grad K(phi) used as fluxes: boundary faces carry no flux.
Eigen::MatrixXd interior_flux_matrix(const KernelMatrices& km) {
  Eigen::MatrixXd g = km.grid.h() * km.gradk_faces;
  g.row(0).setZero();
  g.row(g.rows() - 1).setZero();
  return g;
}

// Columns sqrt(h) w_k, k = 1..n-1: Euclidean-orthonormal basis of the zero-mean subspace.
Eigen::MatrixXd zero_mean_basis(const Grid1D& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n());
  Eigen::MatrixXd q(n, n - 1);
  const double s = std::sqrt(2.0 * grid.h());
  for (Eigen::Index k = 1; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      q(i, k - 1) = s * std::cos(static_cast<double>(k) * kPi * grid.center(static_cast<std::size_t>(i)));
    }
  }
  return q;
}

}  // namespace

LinearizedOperator assemble_linearized(const Grid1D& grid, std::shared_ptr<const KernelMatrices> km, double M) {
  require(M >= 0.0, "constant state M must be nonnegative");
  require(km != nullptr && km->grid == grid, "kernel matrices do not match grid", ErrorCode::grid_mismatch);
  const auto n = static_cast<Eigen::Index>(grid.n());
  const double h = grid.h();

  // divergence: (n) x (n+1)
  Eigen::MatrixXd div = Eigen::MatrixXd::Zero(n, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    div(i, i) = -1.0 / h;
    div(i, i + 1) = 1.0 / h;
  }
  // -div grad is the Neumann three-point stencil
  Eigen::MatrixXd neg_lap = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) {
      neg_lap(i, i) += 1.0 / (h * h);
      neg_lap(i, i - 1) -= 1.0 / (h * h);
    }
    if (i + 1 < n) {
      neg_lap(i, i) += 1.0 / (h * h);
      neg_lap(i, i + 1) -= 1.0 / (h * h);
    }
  }
  LinearizedOperator lop{grid, km, M, neg_lap};
  if (M != 0.0) lop.matrix.noalias() += M * (div * interior_flux_matrix(*km));
  return lop;
}

double bilinear_form(const LinearizedOperator& lop, const Field& phi, const Field& psi) {
  require(phi.grid == lop.grid && psi.grid == lop.grid, "field grid does not match operator",
          ErrorCode::grid_mismatch);
  const double h = lop.grid.h();
  const FaceVector gphi = gradient(phi);
  const FaceVector gpsi = gradient(psi);
  const auto n = static_cast<Eigen::Index>(lop.grid.n());
  const auto interior = [n](const FaceVector& v) { return v.segment(1, n - 1); };
  double j = h * interior(gphi).dot(interior(gpsi));
  if (lop.M != 0.0) {
    const FaceVector gk = apply_grad(*lop.km, phi);
    j -= lop.M * h * interior(gk).dot(interior(gpsi));
  }
  return j;
}

EigenPair principal_eigenpair(const LinearizedOperator& lop) {
  const double asym = (lop.km->k_centers - lop.km->k_centers.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) {
    fail(ErrorCode::unsupported_kernel,
         "principal_eigenpair needs a symmetric kernel (asymmetry " + format_double(asym) + ")");
  }
  const Grid1D& grid = lop.grid;
  const double h = grid.h();
  const Eigen::MatrixXd sym = lop.symmetric_part();
  const Eigen::MatrixXd q = zero_mean_basis(grid);
  const Eigen::MatrixXd reduced = q.transpose() * (sym * q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success) fail(ErrorCode::convergence, "symmetric eigensolver failed");

  const double lambda = solver.eigenvalues()[0];
  Eigen::VectorXd v = q * solver.eigenvectors().col(0);
  v /= std::sqrt(h) * v.norm();
  Field mode(grid, v);
  if (v.dot(SpectralBasis(grid).mode(1).values) < 0.0) mode.values = -mode.values;

  Eigen::VectorXd r = sym * mode.values - lambda * mode.values;
  r.array() -= r.mean();
  const double residual = h * r.cwiseAbs().maxCoeff();
  const double scale = sym.cwiseAbs().rowwise().sum().maxCoeff();
  if (residual > 1e-8 * scale) {
    fail(ErrorCode::convergence, "weak eigen-relation residual " + format_double(residual) + " too large");
  }
  return EigenPair{lambda, std::move(mode), residual};
}

double compute_A(const KernelMatrices& km, const SpectralBasis& basis) {
  require(basis.grid() == km.grid, "basis grid does not match kernel", ErrorCode::grid_mismatch);
  const Eigen::VectorXd w1 = basis.mode(1).values;
  const double h = km.grid.h();
  return h * h * w1.dot(km.k_centers * w1);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::linearly_stable_sufficient: return "linearly_stable_sufficient";
    case Verdict::linearly_unstable: return "linearly_unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

StabilityReport stability_verdict(const KernelSpec& spec, const Grid1D& grid, double M) {
  return stability_verdict(std::make_shared<const KernelMatrices>(assemble(spec, grid)), M);
}

StabilityReport stability_verdict(std::shared_ptr<const KernelMatrices> km, double M) {
  require(M >= 0.0, "constant state M must be nonnegative");
  const Grid1D grid = km->grid;
  const SpectralBasis basis(grid);
  StabilityReport r{.principal_mode = Field(grid)};
  r.M = M;
  r.lambda1 = SpectralBasis::lambda(1);
  r.lambda1_discrete = basis.lambda_discrete(1);
  r.grad_norm = l2_operator_norm(*km, true);
  r.hs_norm = hilbert_schmidt_norm(*km);
  r.A = compute_A(*km, basis);
  r.critical_mass_instability = r.A > 0.0 ? 1.0 / r.A : std::numeric_limits<double>::quiet_NaN();
  const double root = std::sqrt(r.lambda1);
  r.stability_bound_mass = r.grad_norm > 0.0 ? root / r.grad_norm : kInf;
  r.stability_margin = root - M * r.grad_norm;

  const EigenPair ep = principal_eigenpair(assemble_linearized(grid, km, M));
  r.principal_eigenvalue = ep.lambda;
  r.principal_mode = ep.mode;

  const bool stable = M * r.grad_norm < root;
  const bool unstable = r.A > 0.0 && M > 1.0 / r.A;
  r.thresholds_overlap = stable && unstable;
  r.verdict = stable ? Verdict::linearly_stable_sufficient
                     : (unstable ? Verdict::linearly_unstable : Verdict::inconclusive);
  r.eigen_sign_mismatch = (r.verdict == Verdict::linearly_stable_sufficient && ep.lambda < 0.0) ||
                          (r.verdict == Verdict::linearly_unstable && ep.lambda > 0.0);
  return r;
}

std::string to_key_value(const StabilityReport& r) {
  std::ostringstream os;
  os << "M=" << format_double(r.M) << '\n'
     << "lambda1=" << format_double(r.lambda1) << '\n'
     << "lambda1_discrete=" << format_double(r.lambda1_discrete) << '\n'
     << "grad_norm=" << format_double(r.grad_norm) << '\n'
     << "hs_norm=" << format_double(r.hs_norm) << '\n'
     << "A=" << format_double(r.A) << '\n'
     << "M_crit_instab=" << format_double(r.critical_mass_instability) << '\n'
     << "M_bound_stab=" << format_double(r.stability_bound_mass) << '\n'
     << "stability_margin=" << format_double(r.stability_margin) << '\n'
     << "principal_eig=" << format_double(r.principal_eigenvalue) << '\n'
     << "verdict=" << to_string(r.verdict) << '\n'
     << "thresholds_overlap=" << (r.thresholds_overlap ? "true" : "false") << '\n'
     << "eigen_sign_mismatch=" << (r.eigen_sign_mismatch ? "true" : "false") << '\n';
  return os.str();
}

std::string to_csv_row(const StabilityReport& r) {
  std::string s;
  for (double v : {r.M, r.lambda1, r.grad_norm, r.A, r.critical_mass_instability, r.stability_bound_mass,
                   r.principal_eigenvalue}) {
    s += format_double(v);
    s += ',';
  }
  s += to_string(r.verdict);
  return s;
}

}  // namespace aggrestab
