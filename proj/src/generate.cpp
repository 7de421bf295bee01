#include "quartic/generate.hpp"

#include <fmt/format.h>

#include "quartic/errors.hpp"
#include "quartic/random.hpp"

namespace quartic {

namespace {

// Stream ids keep the vector and weight draws independent of each other.
constexpr std::uint64_t kVectorStream = 0x76656374;  // "vect"
constexpr std::uint64_t kWeightStream = 0x77676874;  // "wght"

void check_shape(std::size_t dim, std::size_t k) {
  if (dim == 0 || k == 0) throw InvalidArgument("component generation: need d >= 1 and k >= 1");
  if (k > dim) throw InvalidArgument(fmt::format("component generation: k = {} exceeds d = {}", k, dim));
}

Vector draw_weights(std::size_t k, WeightRange range, std::uint64_t seed) {
  if (!(range.lo > 0.0) || !(range.lo <= range.hi)) {
    throw InvalidArgument(
        fmt::format("weight range [{}, {}] must satisfy 0 < lo <= hi", range.lo, range.hi));
  }
  Vector weights(static_cast<Eigen::Index>(k));
  if (range.lo == range.hi) {
    weights.setConstant(range.lo);
    return weights;
  }
  Engine engine = stream_engine(seed, kWeightStream, 0);
  std::uniform_real_distribution<double> uniform(range.lo, range.hi);
  for (Eigen::Index i = 0; i < weights.size(); ++i) weights(i) = uniform(engine);
  return weights;
}

Matrix gaussian_matrix(std::size_t dim, std::size_t k, std::uint64_t seed) {
  Matrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    Engine engine = stream_engine(seed, kVectorStream, i);
    g.col(static_cast<Eigen::Index>(i)) = gaussian_vector(dim, engine);
  }
  return g;
}

Matrix orthonormal_columns(std::size_t dim, std::size_t k, std::uint64_t seed) {
  const Matrix g = gaussian_matrix(dim, k, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
  q.colwise().normalize();
  return q;
}

}  // namespace

ComponentSet gaussian_unit_components(std::size_t dim, std::size_t k, std::uint64_t seed,
                                      WeightRange weights) {
  check_shape(dim, k);
  Matrix u = gaussian_matrix(dim, k, seed);
  u.colwise().normalize();
  return ComponentSet(std::move(u), draw_weights(k, weights, seed));
}

ComponentSet orthonormal_components(std::size_t dim, std::size_t k, std::uint64_t seed,
                                    WeightRange weights) {
  check_shape(dim, k);
  return ComponentSet(orthonormal_columns(dim, k, seed), draw_weights(k, weights, seed));
}

ComponentSet near_orthogonal_components(std::size_t dim, std::size_t k, double perturbation,
                                        std::uint64_t seed, WeightRange weights) {
  check_shape(dim, k);
  if (!(perturbation >= 0.0)) throw InvalidArgument("near_orthogonal_components: negative perturbation");
  Matrix u = orthonormal_columns(dim, k, seed);
  // Offset the seed so the perturbation is not the Gaussian matrix behind q.
  u += perturbation * gaussian_matrix(dim, k, seed ^ 0x9e3779b97f4a7c15ULL);
  u.colwise().normalize();
  return ComponentSet(std::move(u), draw_weights(k, weights, seed));
}

}  // namespace quartic
