#include "aggrestab/grid.hpp"

#include "aggrestab/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

namespace aggrestab {

Grid1D::Grid1D(std::size_t n) : n_(n), h_(0.0) {
  require(n >= 4, "grid needs at least 4 cells, got " + std::to_string(n));
  h_ = 1.0 / static_cast<double>(n);
}

Eigen::VectorXd Grid1D::centers() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) x[static_cast<Eigen::Index>(i)] = center(i);
  return x;
}

Eigen::VectorXd Grid1D::faces() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(n_ + 1));
  for (std::size_t f = 0; f <= n_; ++f) x[static_cast<Eigen::Index>(f)] = face(f);
  return x;
}

Field::Field(const Grid1D& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  require(static_cast<std::size_t>(values.size()) == g.n(), "field length does not match grid",
          ErrorCode::grid_mismatch);
}

double mass(const Field& f) { return f.grid.h() * f.values.sum(); }

double lp_norm(const Field& f, double p) {
  require(p >= 1.0, "Lp norm needs p >= 1");
  if (std::isinf(p)) return f.values.cwiseAbs().maxCoeff();
  if (p == 1.0) return f.grid.h() * f.values.cwiseAbs().sum();
  if (p == 2.0) return std::sqrt(f.grid.h() * f.values.squaredNorm());
  return std::pow(f.grid.h() * f.values.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

double face_lp_norm(const Grid1D& grid, const FaceVector& g, double p) {
  require(p >= 1.0, "Lp norm needs p >= 1");
  require(static_cast<std::size_t>(g.size()) == grid.n() + 1, "face vector length mismatch",
          ErrorCode::grid_mismatch);
  if (std::isinf(p)) return g.cwiseAbs().maxCoeff();
  if (p == 2.0) return std::sqrt(grid.h() * g.squaredNorm());
  return std::pow(grid.h() * g.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

FaceVector gradient(const Field& f) {
  const auto n = static_cast<Eigen::Index>(f.grid.n());
  const double inv_h = 1.0 / f.grid.h();
  FaceVector g = FaceVector::Zero(n + 1);
  for (Eigen::Index i = 1; i < n; ++i) g[i] = (f.values[i] - f.values[i - 1]) * inv_h;
  return g;
}

Field divergence(const Grid1D& grid, const FaceVector& g) {
  require(static_cast<std::size_t>(g.size()) == grid.n() + 1, "divergence needs n+1 face values",
          ErrorCode::invalid_parameter);
  const auto n = static_cast<Eigen::Index>(grid.n());
  const double inv_h = 1.0 / grid.h();
  Field out(grid);
  for (Eigen::Index i = 0; i < n; ++i) out.values[i] = (g[i + 1] - g[i]) * inv_h;
  return out;
}

Field project_zero_mean(const Field& f) {
  Field out = f;
  out.values.array() -= f.values.mean();
  return out;
}

// FFTW planning is not thread-safe; execution with the new-array interface is.
namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct SpectralBasis::Plans {
  fftw_plan forward = nullptr;   // REDFT10 (DCT-II)
  fftw_plan backward = nullptr;  // REDFT01 (DCT-III)

  explicit Plans(std::size_t n) {
    const int len = static_cast<int>(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* in = fftw_alloc_real(n);
    double* out = fftw_alloc_real(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_r2r_1d(len, in, out, FFTW_REDFT10, flags);
    backward = fftw_plan_r2r_1d(len, in, out, FFTW_REDFT01, flags);
    fftw_free(in);
    fftw_free(out);
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

SpectralBasis::SpectralBasis(const Grid1D& grid)
    : grid_(grid), plans_(std::make_shared<const Plans>(grid.n())) {}

double SpectralBasis::lambda(std::size_t k) noexcept {
  const double kp = static_cast<double>(k) * kPi;
  return kp * kp;
}

double SpectralBasis::lambda_discrete(std::size_t k) const noexcept {
  const double h = grid_.h();
  const double s = std::sin(0.5 * static_cast<double>(k) * kPi * h);
  // 2(1-cos t)/h^2 written as 4 sin^2(t/2)/h^2 to avoid cancellation
  return 4.0 * s * s / (h * h);
}

Field SpectralBasis::mode(std::size_t k) const {
  if (k == 0) return Field::constant(grid_, 1.0);
  const double kp = static_cast<double>(k) * kPi;
  return Field::from_function(grid_, [kp](double x) { return std::sqrt(2.0) * std::cos(kp * x); });
}

Eigen::VectorXd SpectralBasis::to_spectral(const Field& f) const {
  require(f.grid == grid_, "field grid does not match spectral basis", ErrorCode::grid_mismatch);
  const auto n = static_cast<Eigen::Index>(grid_.n());
  Eigen::VectorXd in = f.values;
  Eigen::VectorXd out(n);
  fftw_execute_r2r(plans_->forward, in.data(), out.data());
  // REDFT10 gives Y_k = 2 sum f_i cos(pi k (i+1/2)/n)
  const double h = grid_.h();
  out[0] *= 0.5 * h;
  out.tail(n - 1) *= h / std::sqrt(2.0);
  return out;
}

Field SpectralBasis::from_spectral(const Eigen::VectorXd& c) const {
  const auto n = static_cast<Eigen::Index>(grid_.n());
  require(c.size() == n, "coefficient vector length mismatch", ErrorCode::grid_mismatch);
  Eigen::VectorXd in = c;
  in.tail(n - 1) /= std::sqrt(2.0);
  Field out(grid_);
  // REDFT01 gives f_i = X_0 + 2 sum_{k>=1} X_k cos(pi k (i+1/2)/n)
  fftw_execute_r2r(plans_->backward, in.data(), out.values.data());
  return out;
}

}  // namespace aggrestab
