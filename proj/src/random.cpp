#include "quartic/random.hpp"

namespace quartic {

Engine stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(substream), hi(substream)};
  return Engine(seq);
}

Vector gaussian_vector(std::size_t dim, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector g(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = normal(engine);
  return g;
}

Vector uniform_on_sphere(std::size_t dim, Engine& engine) {
  Vector g = gaussian_vector(dim, engine);
  double norm = g.norm();
  while (norm == 0.0) {
    g = gaussian_vector(dim, engine);
    norm = g.norm();
  }
  return g / norm;
}

}  // namespace quartic
