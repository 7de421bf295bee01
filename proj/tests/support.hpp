#pragma once

// Generators and reference computations shared by the unit and acceptance tests.
// Everything here is written from the definitions, without calling the library
// routine it is used to check.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace testing_support {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

  Vector gaussian(std::size_t d) {
    Vector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal();
    return v;
  }

  Vector unit(std::size_t d) { return gaussian(d).normalized(); }

  /// d x k matrix with unit columns.
  Matrix unit_columns(std::size_t d, std::size_t k) {
    Matrix u(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < u.cols(); ++j) u.col(j) = unit(d);
    return u;
  }

  /// Orthonormal d x k matrix (requires k <= d).
  Matrix orthonormal(std::size_t d, std::size_t k) {
    Matrix g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    for (Eigen::Index j = 0; j < g.cols(); ++j) g.col(j) = gaussian(d);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  }

  /// Random orthogonal d x d matrix.
  Matrix rotation(std::size_t d) { return orthonormal(d, d); }

  /// Coefficients with magnitude in [0.25, 1]; roughly a third negative.
  Vector signed_coefficients(std::size_t k) {
    Vector c(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double m = uniform(0.25, 1.0);
      c(i) = uniform(0.0, 1.0) < 0.3 ? -m : m;
    }
    return c;
  }

  /// Unit vector orthogonal to w.
  Vector tangent(const Vector& w) {
    Vector v = gaussian(static_cast<std::size_t>(w.size()));
    v -= v.dot(w) * w;
    return v.normalized();
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// sum_{a,b,c,e} T(a,b,c,e) w_a w_b w_c w_e with every entry
/// T(a,b,c,e) = sum_i coeff_i u_i(a) u_i(b) u_i(c) u_i(e) formed explicitly.
inline double quadruple_sum(const Vector& coeffs, const Matrix& dirs, const Vector& w) {
  const Eigen::Index d = w.size();
  double total = 0.0;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index e = 0; e < d; ++e) {
          double entry = 0.0;
          for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
            entry += coeffs(i) * dirs(a, i) * dirs(b, i) * dirs(c, i) * dirs(e, i);
          }
          total += entry * w(a) * w(b) * w(c) * w(e);
        }
  return total;
}

/// Vector whose entry a is sum_{b,c,e} T(a,b,c,e) w_b w_c w_e, entries formed explicitly.
inline Vector triple_sum(const Vector& coeffs, const Matrix& dirs, const Vector& w) {
  const Eigen::Index d = w.size();
  Vector out = Vector::Zero(d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index e = 0; e < d; ++e) {
          double entry = 0.0;
          for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
            entry += coeffs(i) * dirs(a, i) * dirs(b, i) * dirs(c, i) * dirs(e, i);
          }
          out(a) += entry * w(b) * w(c) * w(e);
        }
  return out;
}

/// f(w) = -1/4 sum_i coeff_i (u_i^T w)^4 at the normalized point w / |w|.
inline double sphere_objective(const Vector& coeffs, const Matrix& dirs, const Vector& w) {
  const Vector c = dirs.transpose() * w.normalized();
  return -0.25 * (coeffs.array() * c.array().pow(4)).sum();
}

/// Directional derivative of f on the sphere along unit tangent v by central
/// differences through the normalization map.
inline double directional_slope(const Vector& coeffs, const Matrix& dirs, const Vector& w,
                                const Vector& v, double h) {
  return (sphere_objective(coeffs, dirs, w + h * v) - sphere_objective(coeffs, dirs, w - h * v)) /
         (2.0 * h);
}

/// Second derivative of t -> f(normalize(w + t v)) at 0; normalization is a
/// second-order retraction, so this is v^T Hess f(w) v for unit tangent v.
inline double directional_curvature(const Vector& coeffs, const Matrix& dirs, const Vector& w,
                                    const Vector& v, double h) {
  return (sphere_objective(coeffs, dirs, w + h * v) - 2.0 * sphere_objective(coeffs, dirs, w) +
          sphere_objective(coeffs, dirs, w - h * v)) /
         (h * h);
}

/// Max |u_i^T u_j| over i != j, by direct double loop.
inline double pairwise_incoherence(const Matrix& u) {
  double tau = 0.0;
  for (Eigen::Index i = 0; i < u.cols(); ++i)
    for (Eigen::Index j = i + 1; j < u.cols(); ++j) tau = std::max(tau, std::abs(u.col(i).dot(u.col(j))));
  return tau;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("quartic_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
