#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "quartic/tensor.hpp"

namespace quartic {

struct WeightRange {
  double lo = 1.0;
  double hi = 1.0;
};

/// k i.i.d. standard normal vectors, each normalized.
ComponentSet gaussian_unit_components(std::size_t dim, std::size_t k, std::uint64_t seed,
                                      WeightRange weights = {});

/// Orthonormalized k Gaussian vectors (thin Q of a Householder QR).
ComponentSet orthonormal_components(std::size_t dim, std::size_t k, std::uint64_t seed,
                                    WeightRange weights = {});

/// u_i = normalize(q_i + perturbation * g_i) for orthonormal q_i and Gaussian g_i.
/// Small perturbations give sets with tiny incoherence (e.g. k*tau <= 1e-3).
ComponentSet near_orthogonal_components(std::size_t dim, std::size_t k, double perturbation,
                                        std::uint64_t seed, WeightRange weights = {});

}  // namespace quartic
