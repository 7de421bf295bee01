#pragma once

#include <cstddef>
#include <vector>

#include "quartic/io.hpp"
#include "quartic/tensor.hpp"

namespace quartic {

/// Upper threshold on k*tau used by the landscape checks.
inline constexpr double kGeometricKTauLimit = 0.05;
/// Upper threshold on lambda_max/lambda_min for the weighted landscape result.
inline constexpr double kKappaLimit = 1.25;

struct ConditioningReport {
  double tau = 0.0;    ///< max_{i<j} |u_i^T u_j|
  double delta = 0.0;  ///< RIP constant on span(U)
  double kappa = 1.0;
  double k_tau = 0.0;
  bool passes_geometric = false;  ///< k*tau <= 0.05
  bool passes_kappa = false;      ///< kappa <= 5/4
};

struct CorrelationProfile {
  Vector values;                   ///< signed c_i = w^T u_i
  std::vector<std::size_t> order;  ///< indices by descending |c_i|, ties to lower index
};

/// f(w) = -T(w,w,w,w)/4.
double objective(const Rank1SumTensor& t, VectorCRef w);

/// -P_w T(I,w,w,w), with P_w = I - w w^T.
Vector riemannian_gradient(const Rank1SumTensor& t, VectorCRef w);

/// (sum_i a_i c_i^4) P_w - 3 sum_i a_i c_i^2 (P_w u_i)(P_w u_i)^T, a_i the term coefficients.
/// Exactly symmetric; w spans its null space.
Matrix riemannian_hessian(const Rank1SumTensor& t, VectorCRef w);

double measure_incoherence(const ComponentSet& components);

/// delta = max(sigma_max(G) - 1, 1 - sigma_min(G)) for the Gram matrix G = U^T U.
/// For w = U a the ratio |U^T w|^2 / |w|^2 = a^T G^2 a / a^T G a sweeps exactly the
/// spectrum of G, so no sampling is needed. Throws DegenerateComponents when
/// sigma_min(G) <= 1e-10.
double measure_rip(const ComponentSet& components);

CorrelationProfile correlation_profile(const ComponentSet& components, VectorCRef w);

ConditioningReport conditioning_report(const ComponentSet& components);
Json to_json(const ConditioningReport& report);

/// Orthonormal basis (d x (d-1)) of the tangent space {v : v^T w = 0}, built from
/// the Householder reflector that sends w to a multiple of e_1.
Matrix tangent_basis(VectorCRef w);

/// B^T M B for the tangent basis B above, computed in O(d^2) by a two-sided
/// reflector update instead of two dense products.
Matrix restrict_to_tangent(const Matrix& m, VectorCRef w);

}  // namespace quartic
