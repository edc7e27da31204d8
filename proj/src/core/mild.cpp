#include "aggrestab/error.hpp"
#include "aggrestab/format.hpp"
#include "aggrestab/solver.hpp"

#include <algorithm>
#include <cmath>

namespace aggrestab {

namespace {

// Spectral coefficients of div(upwind(u) grad K(u)).
Eigen::VectorXd transport_divergence(const SpectralBasis& basis, const Field& u, const KernelMatrices& km) {
  const auto n = static_cast<Eigen::Index>(u.grid.n());
  const double h = u.grid.h();
  const FaceVector v = transport_velocity(u, SimMode::nonlinear, 0.0, km);
  FaceVector flux = FaceVector::Zero(n + 1);
  for (Eigen::Index f = 1; f < n; ++f) flux[f] = v[f] * (v[f] > 0.0 ? u.values[f - 1] : u.values[f]);
  Field div(u.grid);
  for (Eigen::Index i = 0; i < n; ++i) div.values[i] = (flux[i + 1] - flux[i]) / h;
  return basis.to_spectral(div);
}

}  // namespace

double xt_distance(const std::vector<Field>& a, const std::vector<Field>& b, double q) {
  require(a.size() == b.size() && !a.empty(), "X_T distance needs matching nonempty histories",
          ErrorCode::grid_mismatch);
  double sup1 = 0.0, supq = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    require(a[j].grid == b[j].grid, "X_T distance grids differ", ErrorCode::grid_mismatch);
    const Field d(a[j].grid, a[j].values - b[j].values);
    sup1 = std::max(sup1, lp_norm(d, 1.0));
    supq = std::max(supq, lp_norm(d, q));
  }
  return sup1 + supq;
}

MildSolveDiagnostics picard_mild_solve(const Field& u0, const std::shared_ptr<const KernelMatrices>& km, double T,
                                       const MildSolveOptions& options) {
  require(km && km->grid == u0.grid, "initial datum and kernel grids differ", ErrorCode::grid_mismatch);
  require(std::isfinite(T) && T > 0.0, "mild solve horizon must be positive and finite");
  require(options.time_steps >= 1 && options.max_iterations >= 1, "mild solve needs steps and iterations");
  require(options.q >= 1.0, "X_T exponent must be >= 1");

  const Grid1D& grid = u0.grid;
  const SpectralBasis basis(grid);
  const std::size_t steps = options.time_steps;
  const double dt = T / static_cast<double>(steps);
  const auto n = static_cast<Eigen::Index>(grid.n());

  Eigen::VectorXd decay(n), weight(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lam = basis.lambda_discrete(static_cast<std::size_t>(k));
    decay[k] = std::exp(-lam * dt);
    weight[k] = (k == 0) ? dt : -std::expm1(-lam * dt) / lam;
  }

  std::vector<double> times(steps + 1);
  std::vector<Field> free(steps + 1, u0);
  for (std::size_t j = 0; j <= steps; ++j) {
    times[j] = (j == steps) ? T : static_cast<double>(j) * dt;
    free[j] = heat_semigroup(basis, u0, times[j]);
  }

  MildSolveDiagnostics out;
  out.T_existence = T;
  out.q = options.q;
  out.q_prime = std::isinf(options.q) ? 1.0 : (options.q == 1.0 ? kInf : options.q / (options.q - 1.0));

  std::vector<Field> current = free;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::vector<Eigen::VectorXd> g(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j) g[j] = transport_divergence(basis, current[j], *km);

    std::vector<Field> next(steps + 1, u0);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 1; j <= steps; ++j) {
      b = decay.cwiseProduct(b) - weight.cwiseProduct(0.5 * (g[j - 1] + g[j]));
      next[j] = Field(grid, free[j].values + basis.from_spectral(b).values);
    }
    const double d = xt_distance(next, current, options.q);
    out.picard_distances.push_back(d);
    current = std::move(next);
    if (!std::isfinite(d)) break;
    if (d <= options.tol) {
      out.converged = true;
      break;
    }
  }

  const auto& dist = out.picard_distances;
  if (dist.size() >= 2 && dist.front() > 0.0) {
    out.contraction_ratio = std::pow(dist.back() / dist.front(), 1.0 / static_cast<double>(dist.size() - 1));
  }
  for (std::size_t j = 1; j < dist.size(); ++j) {
    if (!(dist[j] < dist[j - 1])) {
      out.warnings.push_back("distance did not decrease at iteration " + std::to_string(j + 1));
      break;
    }
  }

  const double e = 0.5 * (1.0 - (std::isinf(options.q) ? 0.0 : 1.0 / options.q));
  double sup1 = 0.0, supq = 0.0;
  for (std::size_t j = 0; j <= steps; ++j) {
    out.final_iterate.record(times[j], current[j]);
    sup1 = std::max(sup1, lp_norm(current[j], 1.0));
    supq = std::max(supq, std::pow(times[j], e) * lp_norm(current[j], options.q));
  }
  out.final_iterate.steps = steps;
  out.yt_norm = sup1 + supq;

  if (!out.converged) {
    throw NonContraction("Picard iteration did not reach tol " + format_double(options.tol) + " in " +
                             std::to_string(dist.size()) + " iterations (last distance " +
                             format_double(dist.empty() ? kInf : dist.back()) + ")",
                         dist);
  }
  return out;
}

}  // namespace aggrestab
