#include "quartic/tensor.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "quartic/errors.hpp"

namespace quartic {

namespace detail {

void require_unit(VectorCRef w, double tolerance, const char* what) {
  const double norm = w.norm();
  if (!(std::abs(norm - 1.0) <= tolerance)) {
    throw InvalidArgument(fmt::format("{}: expected unit norm, got {:.17g}", what, norm));
  }
}

void require_dim(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw DimensionMismatch(
        fmt::format("{}: dimension mismatch (expected {}, got {})", what, expected, actual));
  }
}

}  // namespace detail

ComponentSet::ComponentSet(Matrix vectors, Vector weights)
    : vectors_(std::move(vectors)), weights_(std::move(weights)) {
  const auto k = vectors_.cols();
  if (vectors_.rows() == 0 || k == 0) {
    throw InvalidArgument("ComponentSet: need d >= 1 and k >= 1");
  }
  if (k > vectors_.rows()) {
    throw InvalidArgument(
        fmt::format("ComponentSet: k = {} exceeds d = {}", k, vectors_.rows()));
  }
  if (weights_.size() != k) {
    throw DimensionMismatch(
        fmt::format("ComponentSet: {} weights for {} components", weights_.size(), k));
  }
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(weights_(i) > 0.0) || !std::isfinite(weights_(i))) {
      throw InvalidArgument(
          fmt::format("ComponentSet: weight {} is not positive ({:.17g})", i, weights_(i)));
    }
    const double norm = vectors_.col(i).norm();
    if (!(std::abs(norm - 1.0) <= kConstructionUnitTolerance)) {
      throw InvalidArgument(
          fmt::format("ComponentSet: vector {} has norm {:.17g}", i, norm));
    }
  }
}

ComponentSet ComponentSet::with_equal_weights(Matrix vectors) {
  Vector weights = Vector::Ones(vectors.cols());
  return ComponentSet(std::move(vectors), std::move(weights));
}

double ComponentSet::kappa() const { return weights_.maxCoeff() / weights_.minCoeff(); }

ComponentSet ComponentSet::subset(std::span<const std::size_t> indices) const {
  Matrix vectors(vectors_.rows(), static_cast<Eigen::Index>(indices.size()));
  Vector weights(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= rank()) {
      throw InvalidArgument(fmt::format("ComponentSet::subset: index {} out of range", indices[j]));
    }
    vectors.col(static_cast<Eigen::Index>(j)) = vector(indices[j]);
    weights(static_cast<Eigen::Index>(j)) = weight(indices[j]);
  }
  return ComponentSet(std::move(vectors), std::move(weights));
}

Rank1SumTensor::Rank1SumTensor(std::size_t dim)
    : dim_(dim), coefficients_(0), directions_(static_cast<Eigen::Index>(dim), 0) {
  if (dim == 0) throw InvalidArgument("Rank1SumTensor: dimension must be positive");
}

Rank1SumTensor::Rank1SumTensor(Vector coefficients, Matrix directions)
    : dim_(static_cast<std::size_t>(directions.rows())),
      coefficients_(std::move(coefficients)),
      directions_(std::move(directions)) {
  if (dim_ == 0) throw InvalidArgument("Rank1SumTensor: dimension must be positive");
  if (coefficients_.size() != directions_.cols()) {
    throw DimensionMismatch("Rank1SumTensor: coefficient/direction count mismatch");
  }
  for (Eigen::Index i = 0; i < directions_.cols(); ++i) {
    detail::require_unit(directions_.col(i), kConstructionUnitTolerance, "Rank1SumTensor");
    if (!std::isfinite(coefficients_(i))) {
      throw InvalidArgument("Rank1SumTensor: non-finite coefficient");
    }
  }
}

Rank1SumTensor Rank1SumTensor::with_term(double coefficient, VectorCRef direction) const {
  detail::require_dim(dim_, static_cast<std::size_t>(direction.size()), "Rank1SumTensor::with_term");
  detail::require_unit(direction, kOperationUnitTolerance, "Rank1SumTensor::with_term");
  Rank1SumTensor out(dim_);
  const Eigen::Index m = directions_.cols();
  out.coefficients_.resize(m + 1);
  out.coefficients_.head(m) = coefficients_;
  out.coefficients_(m) = coefficient;
  out.directions_.resize(directions_.rows(), m + 1);
  out.directions_.leftCols(m) = directions_;
  out.directions_.col(m) = direction;
  return out;
}

Rank1SumTensor build_tensor(const ComponentSet& components) {
  return Rank1SumTensor(components.weights(), components.vectors());
}

namespace {

void check_argument(const Rank1SumTensor& t, VectorCRef w, const char* what) {
  detail::require_dim(t.dim(), static_cast<std::size_t>(w.size()), what);
  detail::require_unit(w, kOperationUnitTolerance, what);
}

}  // namespace

double contract_full(const Rank1SumTensor& t, VectorCRef w) {
  check_argument(t, w, "contract_full");
  const Vector c = t.directions().transpose() * w;
  return (t.coefficients().array() * c.array().square().square()).sum();
}

Vector contract_vector(const Rank1SumTensor& t, VectorCRef w) {
  check_argument(t, w, "contract_vector");
  const Vector c = t.directions().transpose() * w;
  const Vector scaled = (t.coefficients().array() * c.array().cube()).matrix();
  return t.directions() * scaled;
}

Rank1SumTensor deflate(const Rank1SumTensor& t, VectorCRef u_hat, double lambda_hat) {
  return t.with_term(-lambda_hat, u_hat);
}

DenseTensor4::DenseTensor4(std::size_t dim) : dim_(dim), entries_(dim * dim * dim * dim, 0.0) {}

double DenseTensor4::contract_full(VectorCRef w) const {
  detail::require_dim(dim_, static_cast<std::size_t>(w.size()), "DenseTensor4::contract_full");
  double total = 0.0;
  for (std::size_t a = 0; a < dim_; ++a)
    for (std::size_t b = 0; b < dim_; ++b)
      for (std::size_t c = 0; c < dim_; ++c)
        for (std::size_t e = 0; e < dim_; ++e)
          total += (*this)(a, b, c, e) * w(a) * w(b) * w(c) * w(e);
  return total;
}

Vector DenseTensor4::contract_vector(VectorCRef w) const {
  detail::require_dim(dim_, static_cast<std::size_t>(w.size()), "DenseTensor4::contract_vector");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t a = 0; a < dim_; ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b < dim_; ++b)
      for (std::size_t c = 0; c < dim_; ++c)
        for (std::size_t e = 0; e < dim_; ++e)
          acc += (*this)(a, b, c, e) * w(b) * w(c) * w(e);
    out(static_cast<Eigen::Index>(a)) = acc;
  }
  return out;
}

DenseTensor4 to_dense(const Rank1SumTensor& t, std::size_t max_dim) {
  const std::size_t d = t.dim();
  if (d > max_dim) {
    throw InvalidArgument(fmt::format("to_dense: dimension {} exceeds cap {}", d, max_dim));
  }
  DenseTensor4 dense(d);
  for (std::size_t term = 0; term < t.size(); ++term) {
    const auto u = t.directions().col(static_cast<Eigen::Index>(term));
    const double coeff = t.coefficients()(static_cast<Eigen::Index>(term));
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        for (std::size_t c = 0; c < d; ++c)
          for (std::size_t e = 0; e < d; ++e)
            dense(a, b, c, e) += coeff * u(a) * u(b) * u(c) * u(e);
  }
  return dense;
}

}  // namespace quartic
