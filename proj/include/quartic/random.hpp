#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "quartic/tensor.hpp"

namespace quartic {

using Engine = std::mt19937_64;

/// Independent engine for stream (seed, stream, substream), e.g. restart l of
/// deflation round i. Streams do not depend on the order they are created in.
Engine stream_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

Vector gaussian_vector(std::size_t dim, Engine& engine);

/// Normalized standard Gaussian vector: uniform on the unit sphere.
Vector uniform_on_sphere(std::size_t dim, Engine& engine);

}  // namespace quartic
