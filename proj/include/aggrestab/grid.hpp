#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <memory>

namespace aggrestab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Uniform cell-centred grid on [0,1]: centres x_i = (i+1/2)h, faces x_{i+1/2} = ih.
class Grid1D {
 public:
  explicit Grid1D(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * h_; }
  double face(std::size_t f) const noexcept { return static_cast<double>(f) * h_; }
  Eigen::VectorXd centers() const;
  Eigen::VectorXd faces() const;

  bool operator==(const Grid1D& other) const noexcept { return n_ == other.n_; }

 private:
  std::size_t n_;
  double h_;
};

/// Cell-average values on a grid.
struct Field {
  Grid1D grid;
  Eigen::VectorXd values;

  explicit Field(const Grid1D& g) : grid(g), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.n()))) {}
  Field(const Grid1D& g, Eigen::VectorXd v);

  template <class Fn>
  static Field from_function(const Grid1D& g, Fn&& fn) {
    Field f(g);
    for (std::size_t i = 0; i < g.n(); ++i) f.values[static_cast<Eigen::Index>(i)] = fn(g.center(i));
    return f;
  }

  static Field constant(const Grid1D& g, double c) {
    return Field(g, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.n()), c));
  }
};

/// Face-valued vector, length n+1.
using FaceVector = Eigen::VectorXd;

double mass(const Field& f);
double lp_norm(const Field& f, double p);
/// Lp norm of a face vector with weight h per face (boundary faces included).
double face_lp_norm(const Grid1D& grid, const FaceVector& g, double p);

FaceVector gradient(const Field& f);
Field divergence(const Grid1D& grid, const FaceVector& g);
Field project_zero_mean(const Field& f);

/// Neumann cosine eigenbasis sampled at cell centres (DCT-II convention).
class SpectralBasis {
 public:
  explicit SpectralBasis(const Grid1D& grid);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.n(); }

  /// Continuum eigenvalue (k pi)^2.
  static double lambda(std::size_t k) noexcept;
  /// Symbol of the three-point Neumann Laplacian, (2/h^2)(1 - cos(k pi h)).
  double lambda_discrete(std::size_t k) const noexcept;

  /// w_0 = 1, w_k = sqrt(2) cos(k pi x).
  Field mode(std::size_t k) const;

  /// c_k = h sum_i f_i w_k(x_i).
  Eigen::VectorXd to_spectral(const Field& f) const;
  Field from_spectral(const Eigen::VectorXd& c) const;

 private:
  struct Plans;
  Grid1D grid_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace aggrestab
