#pragma once

// Reference computations used by the tests. They are deliberately naive and share no code with the library.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

inline double center(std::size_t i, std::size_t n) { return (static_cast<double>(i) + 0.5) / static_cast<double>(n); }

inline double w(std::size_t k, double x) { return k == 0 ? 1.0 : std::sqrt(2.0) * std::cos(static_cast<double>(k) * pi * x); }

// O(n^2) cosine coefficients c_k = h sum_i f_i w_k(x_i).
inline std::vector<double> cosine_coefficients(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<double> c(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) c[k] += f[i] * w(k, center(i, n));
    c[k] /= static_cast<double>(n);
  }
  return c;
}

inline double lp(const std::vector<double>& f, double p) {
  const double h = 1.0 / static_cast<double>(f.size());
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : f) s += h * std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

// Neumann Green function of -u'' + u on [0,1].
inline double green(double x, double y) {
  const double lo = std::min(x, y), hi = std::max(x, y);
  return std::cosh(lo) * std::cosh(1.0 - hi) / std::sinh(1.0);
}

inline double green_dx(double x, double y) {
  if (x < y) return std::sinh(x) * std::cosh(1.0 - y) / std::sinh(1.0);
  return -std::cosh(y) * std::sinh(1.0 - x) / std::sinh(1.0);
}

// Same function from its cosine series 1/a + 2 sum cos(k pi x) cos(k pi y)/(a + k^2 pi^2).
inline double green_series(double a, double x, double y, int terms) {
  double s = 1.0 / a;
  for (int k = 1; k <= terms; ++k) {
    const double kp = k * pi;
    s += 2.0 * std::cos(kp * x) * std::cos(kp * y) / (a + kp * kp);
  }
  return s;
}

// Dense tridiagonal solve by Gaussian elimination without pivoting.
inline std::vector<double> tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                                       std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace oracle
