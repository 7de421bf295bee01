#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace quartic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorCRef = Eigen::Ref<const Eigen::VectorXd>;

/// Unit-norm tolerance applied when a component set or tensor is built.
inline constexpr double kConstructionUnitTolerance = 1e-12;
/// Unit-norm tolerance for arguments of contractions and iterations.
inline constexpr double kOperationUnitTolerance = 1e-9;

/// Components u_1..u_k (columns of a d x k matrix) with positive weights.
///
/// Invariants: every column has unit norm, every weight is positive, k <= d.
class ComponentSet {
 public:
  ComponentSet(Matrix vectors, Vector weights);

  static ComponentSet with_equal_weights(Matrix vectors);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(vectors_.cols()); }

  const Matrix& vectors() const noexcept { return vectors_; }
  const Vector& weights() const noexcept { return weights_; }

  auto vector(std::size_t i) const { return vectors_.col(static_cast<Eigen::Index>(i)); }
  double weight(std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }

  /// lambda_max / lambda_min.
  double kappa() const;

  /// Components reordered (or restricted) to the given indices.
  ComponentSet subset(std::span<const std::size_t> indices) const;

 private:
  Matrix vectors_;
  Vector weights_;
};

/// Signed sum  sum_i coeff_i * u_i^{(x)4}  of symmetric fourth powers.
///
/// Positive terms come from true components; deflation appends negative ones.
/// The d^4 array is never formed here, so every contraction costs O(d * terms).
class Rank1SumTensor {
 public:
  explicit Rank1SumTensor(std::size_t dim);
  Rank1SumTensor(Vector coefficients, Matrix directions);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(coefficients_.size()); }

  const Vector& coefficients() const noexcept { return coefficients_; }
  const Matrix& directions() const noexcept { return directions_; }

  /// Copy with a term appended; direction checked at operation tolerance.
  Rank1SumTensor with_term(double coefficient, VectorCRef direction) const;

 private:
  std::size_t dim_;
  Vector coefficients_;
  Matrix directions_;
};

Rank1SumTensor build_tensor(const ComponentSet& components);

/// T(w,w,w,w) = sum_i coeff_i (u_i^T w)^4.
double contract_full(const Rank1SumTensor& t, VectorCRef w);

/// T(I,w,w,w) = sum_i coeff_i (u_i^T w)^3 u_i.
Vector contract_vector(const Rank1SumTensor& t, VectorCRef w);

/// T - lambda_hat * u_hat^{(x)4}.
Rank1SumTensor deflate(const Rank1SumTensor& t, VectorCRef u_hat, double lambda_hat);

/// Explicit d^4 array. Only meant as a test oracle for small d.
class DenseTensor4 {
 public:
  static constexpr std::size_t kDefaultMaxDim = 8;

  explicit DenseTensor4(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }

  double& operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t e) {
    return entries_[index(a, b, c, e)];
  }
  double operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t e) const {
    return entries_[index(a, b, c, e)];
  }

  /// Quadruple sum  sum T(a,b,c,e) w(a) w(b) w(c) w(e).
  double contract_full(VectorCRef w) const;
  /// Triple sum over the last three indices.
  Vector contract_vector(VectorCRef w) const;

 private:
  std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t e) const {
    return ((a * dim_ + b) * dim_ + c) * dim_ + e;
  }

  std::size_t dim_;
  std::vector<double> entries_;
};

DenseTensor4 to_dense(const Rank1SumTensor& t,
                      std::size_t max_dim = DenseTensor4::kDefaultMaxDim);

namespace detail {
void require_unit(VectorCRef w, double tolerance, const char* what);
void require_dim(std::size_t expected, std::size_t actual, const char* what);
}  // namespace detail

}  // namespace quartic
