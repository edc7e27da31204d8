#include "aggrestab/kernel.hpp"

#include "aggrestab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace aggrestab {

namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Sum_{k>=1} cos(k theta)/k^2 on [0, 2 pi].
double clausen_even(double theta) { return kPi * kPi / 6.0 - kPi * theta / 2.0 + theta * theta / 4.0; }

struct SeriesSums {
  double value = 0.0;
  double grad_x = 0.0;
};

// Remainder of the accelerated Green series: sum_k 2 cos(k pi x) cos(k pi y) / (k^2 pi^2 (a + k^2 pi^2))
// and its x-derivative, with the trigonometric values advanced by rotation.
SeriesSums green_series_remainder(double a, int m, double x, double y) {
  const double cx1 = std::cos(kPi * x), sx1 = std::sin(kPi * x);
  const double cy1 = std::cos(kPi * y), sy1 = std::sin(kPi * y);
  double cx = cx1, sx = sx1, cy = cy1, sy = sy1;
  SeriesSums s;
  for (int k = 1; k <= m; ++k) {
    const double kp = static_cast<double>(k) * kPi;
    const double d = 2.0 / (kp * kp * (a + kp * kp));
    s.value += d * cx * cy;
    s.grad_x -= d * kp * sx * cy;
    const double ncx = cx * cx1 - sx * sx1;
    const double nsx = sx * cx1 + cx * sx1;
    const double ncy = cy * cy1 - sy * sy1;
    const double nsy = sy * cy1 + cy * sy1;
    cx = ncx, sx = nsx, cy = ncy, sy = nsy;
  }
  return s;
}

double green_series_leading(double a, double x, double y) {
  return 1.0 / a + (clausen_even(kPi * std::abs(x - y)) + clausen_even(kPi * (x + y))) / (kPi * kPi);
}

double green_series_leading_grad(double x, double y) {
  return sgn(x - y) * (std::abs(x - y) - 1.0) / 2.0 + (x + y - 1.0) / 2.0;
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGaussNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

// Average of K(x, .) over [x - h/2, x + h/2]; each half cell is smooth.
double cell_average(const KernelSpec& spec, double x, double h) {
  double acc = 0.0;
  for (int side = -1; side <= 1; side += 2) {
    const double mid = x + side * h / 4.0;
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      acc += kGaussWeights[q] * spec.eval(x, mid + kGaussNodes[q] * h / 4.0);
    }
  }
  // each half has length h/2 and Jacobian h/4
  return acc * (h / 4.0) / h;
}

double interp_index(double x, double offset, double h, std::size_t count, std::size_t& lo) {
  double s = x / h - offset;
  s = std::clamp(s, 0.0, static_cast<double>(count - 1));
  lo = std::min(static_cast<std::size_t>(s), count - 2);
  return s - static_cast<double>(lo);
}

}  // namespace

const char* to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::green_closed_form: return "green_closed_form";
    case KernelVariant::green_series: return "green_series";
    case KernelVariant::gaussian: return "gaussian";
    case KernelVariant::power_law_gradient: return "power_law_gradient";
    case KernelVariant::tabulated: return "tabulated";
  }
  return "unknown";
}

KernelSpec KernelSpec::green_closed_form() {
  KernelSpec s;
  s.variant_ = KernelVariant::green_closed_form;
  s.a_ = 1.0;
  return s;
}

KernelSpec KernelSpec::green_series(double a, int m) {
  require(a > 0.0, "green_series needs a > 0");
  require(m >= 8, "green_series needs at least 8 terms");
  KernelSpec s;
  s.variant_ = KernelVariant::green_series;
  s.a_ = a;
  s.m_ = m;
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma, double c) {
  require(sigma > 0.0, "gaussian needs sigma > 0");
  KernelSpec s;
  s.variant_ = KernelVariant::gaussian;
  s.sigma_ = sigma;
  s.c_ = c;
  return s;
}

KernelSpec KernelSpec::power_law_gradient(double alpha, double delta) {
  require(alpha > 0.0, "power_law_gradient needs alpha > 0");
  require(delta >= 0.0, "power_law_gradient needs delta >= 0");
  require(delta > 0.0 || alpha < 1.0, "power_law_gradient with delta = 0 needs alpha < 1");
  KernelSpec s;
  s.variant_ = KernelVariant::power_law_gradient;
  s.alpha_ = alpha;
  s.delta_ = delta;
  return s;
}

KernelSpec KernelSpec::tabulated(TabulatedKernel table) {
  const auto n = static_cast<Eigen::Index>(table.grid.n());
  require(table.k_centers.rows() == n && table.k_centers.cols() == n, "tabulated k_centers must be n x n",
          ErrorCode::grid_mismatch);
  require(table.gradk_faces.rows() == n + 1 && table.gradk_faces.cols() == n,
          "tabulated gradk_faces must be (n+1) x n", ErrorCode::grid_mismatch);
  KernelSpec s;
  s.variant_ = KernelVariant::tabulated;
  s.table_ = std::make_shared<const TabulatedKernel>(std::move(table));
  return s;
}

KernelSpec KernelSpec::zero() { return green_closed_form().scaled(0.0); }

KernelSpec KernelSpec::scaled(double c) const {
  KernelSpec s = *this;
  s.scale_ *= c;
  return s;
}

double KernelSpec::eval(double x, double y) const {
  double k = 0.0;
  switch (variant_) {
    case KernelVariant::green_closed_form: {
      const double e2 = std::exp(2.0);
      k = 0.5 * std::exp(-std::abs(x - y)) +
          (std::exp(x + y) + std::exp(2.0 - x - y) + std::exp(x - y) + std::exp(y - x)) / (2.0 * (e2 - 1.0));
      break;
    }
    case KernelVariant::green_series:
      k = green_series_leading(a_, x, y) - a_ * green_series_remainder(a_, m_, x, y).value;
      break;
    case KernelVariant::gaussian: {
      const double r = x - y;
      k = c_ * std::exp(-r * r / (2.0 * sigma_ * sigma_));
      break;
    }
    case KernelVariant::power_law_gradient: {
      const double r = std::abs(x - y);
      if (delta_ == 0.0 && r == 0.0) fail(ErrorCode::singularity, "power_law_gradient evaluated on its diagonal");
      const double d = r + delta_;
      k = (alpha_ == 1.0) ? -std::log(d) : std::pow(d, 1.0 - alpha_) / (alpha_ - 1.0);
      break;
    }
    case KernelVariant::tabulated: {
      const auto& t = *table_;
      const std::size_t n = t.grid.n();
      std::size_t i = 0, j = 0;
      const double fx = interp_index(x, 0.5, t.grid.h(), n, i);
      const double fy = interp_index(y, 0.5, t.grid.h(), n, j);
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      k = (1 - fx) * (1 - fy) * t.k_centers(I, J) + fx * (1 - fy) * t.k_centers(I + 1, J) +
          (1 - fx) * fy * t.k_centers(I, J + 1) + fx * fy * t.k_centers(I + 1, J + 1);
      break;
    }
  }
  return scale_ * k;
}

double KernelSpec::grad_x(double x, double y) const {
  double g = 0.0;
  switch (variant_) {
    case KernelVariant::green_closed_form: {
      const double e2 = std::exp(2.0);
      g = -0.5 * sgn(x - y) * std::exp(-std::abs(x - y)) +
          (std::exp(x + y) - std::exp(2.0 - x - y) + std::exp(x - y) - std::exp(y - x)) / (2.0 * (e2 - 1.0));
      break;
    }
    case KernelVariant::green_series:
      g = green_series_leading_grad(x, y) - a_ * green_series_remainder(a_, m_, x, y).grad_x;
      break;
    case KernelVariant::gaussian: {
      const double r = x - y;
      g = -c_ * r / (sigma_ * sigma_) * std::exp(-r * r / (2.0 * sigma_ * sigma_));
      break;
    }
    case KernelVariant::power_law_gradient: {
      const double r = x - y;
      if (delta_ == 0.0 && r == 0.0) fail(ErrorCode::singularity, "power_law_gradient gradient on its diagonal");
      g = -sgn(r) * std::pow(std::abs(r) + delta_, -alpha_);
      break;
    }
    case KernelVariant::tabulated: {
      const auto& t = *table_;
      const std::size_t n = t.grid.n();
      std::size_t f = 0, j = 0;
      const double fx = interp_index(x, 0.0, t.grid.h(), n + 1, f);
      const double fy = interp_index(y, 0.5, t.grid.h(), n, j);
      const auto F = static_cast<Eigen::Index>(f), J = static_cast<Eigen::Index>(j);
      g = (1 - fx) * (1 - fy) * t.gradk_faces(F, J) + fx * (1 - fy) * t.gradk_faces(F + 1, J) +
          (1 - fx) * fy * t.gradk_faces(F, J + 1) + fx * fy * t.gradk_faces(F + 1, J + 1);
      break;
    }
  }
  return scale_ * g;
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << to_string(variant_);
  switch (variant_) {
    case KernelVariant::green_closed_form: os << "(a=1)"; break;
    case KernelVariant::green_series: os << "(a=" << a_ << ",m=" << m_ << ")"; break;
    case KernelVariant::gaussian: os << "(sigma=" << sigma_ << ",c=" << c_ << ")"; break;
    case KernelVariant::power_law_gradient: os << "(alpha=" << alpha_ << ",delta=" << delta_ << ")"; break;
    case KernelVariant::tabulated: os << "(n=" << table_->grid.n() << ")"; break;
  }
  if (scale_ != 1.0) os << "*" << scale_;
  return os.str();
}

KernelSpec load_tabulated_csv(const std::string& path, const Grid1D& grid) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open kernel table " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::load, "empty kernel table " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,k,gradk") fail(ErrorCode::load, "kernel table header must be x,y,k,gradk");

  const std::size_t n = grid.n();
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd k(N, N);
  Eigen::MatrixXd gc(N, N);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (row >= n * n) fail(ErrorCode::load, "kernel table has more than n^2 rows for n=" + std::to_string(n));
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::array<double, 4> v{};
    for (std::size_t c = 0; c < 4; ++c) {
      std::string cell;
      if (!std::getline(ls, cell, ',')) fail(ErrorCode::load, "kernel table row " + std::to_string(row) + " short");
      try {
        std::size_t used = 0;
        v[c] = std::stod(cell, &used);
      } catch (const std::exception&) {
        fail(ErrorCode::load, "kernel table row " + std::to_string(row) + " has a non-numeric cell");
      }
    }
    const std::size_t i = row / n, j = row % n;
    if (std::abs(v[0] - grid.center(i)) > 1e-9 || std::abs(v[1] - grid.center(j)) > 1e-9) {
      fail(ErrorCode::load, "kernel table row " + std::to_string(row) + " does not lie on the n=" +
                                std::to_string(n) + " grid");
    }
    k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[2];
    gc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[3];
    ++row;
  }
  if (row != n * n) fail(ErrorCode::load, "kernel table has " + std::to_string(row) + " rows, expected n^2");

  const double h = grid.h();
  Eigen::MatrixXd faces(N + 1, N);
  for (Eigen::Index f = 1; f < N; ++f) faces.row(f) = (k.row(f) - k.row(f - 1)) / h;
  faces.row(0) = 2.0 * gc.row(0) - faces.row(1);
  faces.row(N) = 2.0 * gc.row(N - 1) - faces.row(N - 1);
  return KernelSpec::tabulated({grid, std::move(k), std::move(faces)});
}

void write_tabulated_csv(const std::string& path, const KernelSpec& spec, const Grid1D& grid) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write kernel table " + path);
  out.imbue(std::locale::classic());
  out << std::setprecision(17) << "x,y,k,gradk\n";
  for (std::size_t i = 0; i < grid.n(); ++i) {
    for (std::size_t j = 0; j < grid.n(); ++j) {
      const double x = grid.center(i), y = grid.center(j);
      const double g = (spec.variant() == KernelVariant::power_law_gradient && spec.delta() == 0.0 && i == j)
                           ? 0.0
                           : spec.grad_x(x, y);
      out << x << ',' << y << ',' << spec.eval(x, y) << ',' << g << '\n';
    }
  }
  if (!out) fail(ErrorCode::io, "failed writing kernel table " + path);
}

namespace {

Eigen::MatrixXd sample_gradient(const KernelSpec& spec, const Grid1D& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n());
  Eigen::MatrixXd g(n + 1, n);
  if (spec.scale() == 0.0) return Eigen::MatrixXd::Zero(n + 1, n);
  if (spec.variant() == KernelVariant::tabulated) {
    require(spec.table()->grid == grid, "tabulated kernel sampled on a different grid", ErrorCode::grid_mismatch);
    return spec.scale() * spec.table()->gradk_faces;
  }
  if (spec.variant() == KernelVariant::green_series) {
    const Eigen::VectorXd x = grid.centers();
    const Eigen::VectorXd xf = grid.faces();
    const int m = spec.series_terms();
    const double a = spec.a();
    Eigen::MatrixXd cx(n, m);
    Eigen::MatrixXd sf(n + 1, m);
    Eigen::VectorXd w(m);
    for (int k = 1; k <= m; ++k) {
      const double kp = static_cast<double>(k) * kPi;
      w[k - 1] = 2.0 * kp / (kp * kp * (a + kp * kp));
      cx.col(k - 1) = (kp * x.array()).cos().matrix();
      sf.col(k - 1) = (kp * xf.array()).sin().matrix();
    }
    g.noalias() = a * (sf * w.asDiagonal()) * cx.transpose();
    for (Eigen::Index f = 0; f <= n; ++f) {
      for (Eigen::Index j = 0; j < n; ++j) g(f, j) += green_series_leading_grad(xf[f], x[j]);
    }
    return spec.scale() * g;
  }
  for (Eigen::Index f = 0; f <= n; ++f) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(f, j) = spec.grad_x(grid.face(static_cast<std::size_t>(f)), grid.center(static_cast<std::size_t>(j)));
    }
  }
  return g;
}

Eigen::MatrixXd sample_values(const KernelSpec& spec, const Grid1D& grid) {
  const auto n = static_cast<Eigen::Index>(grid.n());
  if (spec.scale() == 0.0) return Eigen::MatrixXd::Zero(n, n);
  if (spec.variant() == KernelVariant::tabulated) {
    require(spec.table()->grid == grid, "tabulated kernel sampled on a different grid", ErrorCode::grid_mismatch);
    return spec.scale() * spec.table()->k_centers;
  }
  Eigen::MatrixXd k(n, n);
  if (spec.variant() == KernelVariant::green_series) {
    const Eigen::VectorXd x = grid.centers();
    const int m = spec.series_terms();
    const double a = spec.a();
    Eigen::MatrixXd cx(n, m);
    Eigen::VectorXd w(m);
    for (int kk = 1; kk <= m; ++kk) {
      const double kp = static_cast<double>(kk) * kPi;
      w[kk - 1] = 2.0 / (kp * kp * (a + kp * kp));
      cx.col(kk - 1) = (kp * x.array()).cos().matrix();
    }
    k.noalias() = -a * (cx * w.asDiagonal()) * cx.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) k(i, j) += green_series_leading(a, x[i], x[j]);
    }
    k *= spec.scale();
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == j) continue;
        k(i, j) = spec.eval(grid.center(static_cast<std::size_t>(i)), grid.center(static_cast<std::size_t>(j)));
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) k(i, i) = cell_average(spec, grid.center(static_cast<std::size_t>(i)), grid.h());
  return k;
}

// Row norms use weight h per centre; column norms weight h per face, h/2 on the two boundary faces.
double sup_norms(const Eigen::MatrixXd& g, double h, double q_prime) {
  if (g.size() == 0) return 0.0;
  if (std::isinf(q_prime)) return 2.0 * g.cwiseAbs().maxCoeff();
  const Eigen::ArrayXXd p = g.cwiseAbs().array().pow(q_prime);
  const double rows = (h * p.rowwise().sum()).maxCoeff();
  Eigen::ArrayXd wf = Eigen::ArrayXd::Constant(g.rows(), h);
  wf[0] = wf[g.rows() - 1] = h / 2.0;
  const double cols = (p.colwise() * wf).colwise().sum().maxCoeff();
  return std::pow(rows, 1.0 / q_prime) + std::pow(cols, 1.0 / q_prime);
}

}  // namespace

KernelMatrices assemble(const KernelSpec& spec, const Grid1D& grid) {
  return KernelMatrices{grid, sample_values(spec, grid), sample_gradient(spec, grid)};
}

Field apply(const KernelMatrices& km, const Field& u) {
  require(u.grid == km.grid, "field and kernel grids differ", ErrorCode::grid_mismatch);
  return Field(km.grid, km.grid.h() * (km.k_centers * u.values));
}

FaceVector apply_grad(const KernelMatrices& km, const Field& u) {
  require(u.grid == km.grid, "field and kernel grids differ", ErrorCode::grid_mismatch);
  return km.grid.h() * (km.gradk_faces * u.values);
}

double norm_inf_qprime_discrete(const KernelMatrices& km, double q_prime) {
  require(q_prime >= 1.0, "q' must lie in [1, inf]");
  return sup_norms(km.gradk_faces, km.grid.h(), q_prime);
}

KernelNormEstimate norm_inf_qprime(const KernelSpec& spec, double q_prime, const std::vector<std::size_t>& levels) {
  require(q_prime >= 1.0, "q' must lie in [1, inf]");
  require(!levels.empty(), "norm estimate needs at least one refinement level");
  require(std::is_sorted(levels.begin(), levels.end()) &&
              std::adjacent_find(levels.begin(), levels.end()) == levels.end(),
          "refinement levels must be strictly increasing");
  KernelNormEstimate est;
  est.q_prime = q_prime;
  for (std::size_t n : levels) {
    const Grid1D grid(n);
    est.refinement_trend.emplace_back(n, sup_norms(sample_gradient(spec, grid), grid.h(), q_prime));
  }
  est.value = est.refinement_trend.back().second;
  if (!std::isfinite(est.value)) {
    est.infinite = true;
    est.value = kInf;
    return est;
  }
  if (est.refinement_trend.size() >= 2) {
    const auto& [n0, v0] = est.refinement_trend[est.refinement_trend.size() - 2];
    const auto& [n1, v1] = est.refinement_trend.back();
    if (v0 > 0.0 && v1 > 0.0) {
      const double doublings = std::log2(static_cast<double>(n1) / static_cast<double>(n0));
      est.norm_exponent = std::log2(v1 / v0) / doublings;
      const double power = std::isinf(q_prime) ? 1.0 : q_prime;
      est.growth_ratio = std::exp2(power * est.norm_exponent);
    }
  }
  est.infinite = est.growth_ratio > 2.0;
  est.ambiguous = !est.infinite && est.growth_ratio >= 1.2;
  if (est.infinite) est.value = kInf;
  return est;
}

double hilbert_schmidt_norm(const KernelMatrices& km) {
  const double h = km.grid.h();
  const Eigen::Index last = km.gradk_faces.rows() - 1;
  double s = h * km.gradk_faces.squaredNorm();
  s -= 0.5 * h * (km.gradk_faces.row(0).squaredNorm() + km.gradk_faces.row(last).squaredNorm());
  return std::sqrt(h * s);
}

ValidationReport validate_assumptions(const KernelSpec& spec, const Grid1D& grid, double tol,
                                      const std::vector<double>& q_primes) {
  require(tol > 0.0, "validation tolerance must be positive");
  const KernelMatrices km = assemble(spec, grid);
  const auto n = static_cast<Eigen::Index>(grid.n());
  ValidationReport r;
  r.tol = tol;
  r.boundary_residual = std::max(km.gradk_faces.row(0).cwiseAbs().maxCoeff(),
                                 km.gradk_faces.row(n).cwiseAbs().maxCoeff());
  r.boundary_ok = r.boundary_residual <= tol;
  const Eigen::VectorXd row_sums = grid.h() * km.gradk_faces.middleRows(1, n - 1).rowwise().sum();
  r.mass_neutral_residual = row_sums.cwiseAbs().maxCoeff();
  r.mass_neutral_ok = r.mass_neutral_residual <= tol;

  std::vector<std::size_t> levels;
  if (spec.variant() == KernelVariant::tabulated) {
    levels = {grid.n()};
  } else {
    for (std::size_t l : {grid.n() / 4, grid.n() / 2, grid.n()}) {
      if (l >= 4 && (levels.empty() || l > levels.back())) levels.push_back(l);
    }
  }
  r.norm_ok = true;
  for (double q : q_primes) {
    r.norms.push_back(norm_inf_qprime(spec, q, levels));
    r.norm_ok = r.norm_ok && !r.norms.back().infinite;
  }
  r.symmetry_residual = (km.k_centers - km.k_centers.transpose()).cwiseAbs().maxCoeff();
  r.hs_norm = hilbert_schmidt_norm(km);
  return r;
}

double l2_operator_norm(const KernelMatrices& km, bool restrict_zero_mean, std::uint64_t seed) {
  const Eigen::MatrixXd g = km.grid.h() * km.gradk_faces;
  const auto n = g.cols();
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  }
  auto project = [&](Eigen::VectorXd& w) {
    if (restrict_zero_mean) w.array() -= w.mean();
  };
  project(v);
  if (v.norm() == 0.0) return 0.0;
  v.normalize();

  double sigma = 0.0;
  int settled = 0;
  for (int it = 0; it < 10000; ++it) {
    const Eigen::VectorXd gv = g * v;
    const double next = gv.norm();
    if (next == 0.0) return 0.0;
    if (it > 0 && std::abs(next - sigma) <= 1e-8 * next) {
      if (++settled >= 3) return next;
    } else {
      settled = 0;
    }
    sigma = next;
    Eigen::VectorXd w = g.transpose() * gv;
    project(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
  }
  fail(ErrorCode::convergence, "power iteration for the operator norm did not converge in 10000 iterations");
}

const char* to_string(Singularity s) {
  switch (s) {
    case Singularity::mildly_singular: return "mildly_singular";
    case Singularity::strongly_singular: return "strongly_singular";
    case Singularity::undetermined: return "undetermined";
  }
  return "undetermined";
}

Classification classify(const KernelSpec& spec, const std::vector<std::size_t>& levels) {
  Classification c;
  for (double q : {kInf, 4.0, 2.0, 1.5, 1.1, 1.0}) c.probes.push_back(norm_inf_qprime(spec, q, levels));

  bool finite_above_one = false, finite_at_one = false, any_ambiguous = false;
  for (const auto& p : c.probes) {
    const bool finite = !p.infinite && !p.ambiguous;
    if (p.q_prime > 1.0 && finite) finite_above_one = true;
    if (p.q_prime == 1.0 && finite) finite_at_one = true;
    any_ambiguous = any_ambiguous || p.ambiguous;
  }
  if (finite_above_one) {
    c.kind = Singularity::mildly_singular;
  } else if (finite_at_one && !any_ambiguous) {
    c.kind = Singularity::strongly_singular;
  } else {
    c.kind = Singularity::undetermined;
  }

  // |d_xK| ~ r^(-alpha) gives a norm exponent gamma = alpha - 1/q', so 1/alpha = 1/(gamma + 1/q').
  double estimate = kInf;
  double closest = kInf;
  for (const auto& p : c.probes) {
    if (p.growth_ratio < 1.2) continue;
    if (p.q_prime < closest) {
      const double inv_q = std::isinf(p.q_prime) ? 0.0 : 1.0 / p.q_prime;
      closest = p.q_prime;
      estimate = 1.0 / (p.norm_exponent + inv_q);
    }
  }
  c.critical_q_prime = estimate;
  return c;
}

}  // namespace aggrestab
