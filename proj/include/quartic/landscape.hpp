#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "quartic/geometry.hpp"
#include "quartic/tensor.hpp"

namespace quartic {

inline constexpr double kDefaultGradTolerance = 1e-9;
inline constexpr double kDefaultEigTolerance = 1e-8;
inline constexpr double kDefaultDescentStep = 0.1;
inline constexpr std::size_t kDefaultDescentIterations = 200000;
inline constexpr int kMaxStepHalvings = 30;

struct DescentResult {
  Vector point;
  std::vector<double> objective_trace;  ///< f(w_0), f(w_1), ...; non-increasing
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;  ///< gradient norm reached grad_tol
};

/// w <- normalize(w - step * grad f(w)) until |grad f(w)| <= grad_tol or
/// max_iters. A step that would raise f is halved up to 30 times; failing
/// that, StalledDescent is thrown with the current iterate.
DescentResult manifold_gradient_descent(const Rank1SumTensor& t, VectorCRef w0,
                                        double step = kDefaultDescentStep,
                                        std::size_t max_iters = kDefaultDescentIterations,
                                        double grad_tol = kDefaultGradTolerance);

enum class PointKind { minimum, saddle, non_critical };

std::string_view to_string(PointKind kind);

struct CriticalPointCertificate {
  Vector point;
  double gradient_norm = 0.0;
  double min_tangent_eigenvalue = 0.0;
  Vector tangent_spectrum;  ///< ascending; the null direction w is excluded
  PointKind classification = PointKind::non_critical;
  double lambda_value = 0.0;  ///< sum_i a_i (w^T u_i)^4, the first-order multiplier
};

CriticalPointCertificate certify(const Rank1SumTensor& t, VectorCRef w,
                                 double grad_tol = kDefaultGradTolerance,
                                 double eig_tol = kDefaultEigTolerance);

/// |c_(1)| > sqrt(2) |c_(2)| for the two largest correlation magnitudes.
bool gap_check(const CorrelationProfile& profile);

struct ProximityResult {
  std::size_t index = 0;
  int sign = 1;
  double error = 0.0;  ///< |w - sign * u_index|
  double bound = 0.0;  ///< 350 * kappa * sqrt(k) * tau^3
  bool within = false;  ///< error <= bound + kRoundoffAllowance
};

ProximityResult proximity_check(VectorCRef w, const ComponentSet& truth);

/// |w - (w^T u_i) u_i| / |w^T u_i|, or +infinity when w is orthogonal to u_i.
double correlation_ratio(VectorCRef w, const ComponentSet& truth, std::size_t i);

/// Central differences of f along an orthonormal tangent basis, each probe
/// retracted by normalization: (f(R(w + h b)) - f(R(w - h b))) / 2h.
Vector finite_difference_gradient(const Rank1SumTensor& t, VectorCRef w, double h);

/// Second difference (f(R(w + h v)) - 2 f(w) + f(R(w - h v))) / h^2 along a unit
/// tangent v. Normalization is a second-order retraction on the sphere, so this
/// approximates v^T Hess f(w) v.
double finite_difference_curvature(const Rank1SumTensor& t, VectorCRef w, VectorCRef v, double h);

struct DescentOptions {
  double step = kDefaultDescentStep;
  std::size_t max_iters = kDefaultDescentIterations;
  double grad_tol = kDefaultGradTolerance;
  double eig_tol = kDefaultEigTolerance;
  std::size_t threads = 1;
};

/// One CSV row per descent start.
struct SweepRow {
  std::uint64_t seed = 0;
  std::size_t d = 0;
  std::size_t k = 0;
  double tau = 0.0;
  double delta = 0.0;
  double kappa = 0.0;
  std::string_view point_kind;  ///< minimum | saddle | non-critical | stalled
  double gradient_norm = 0.0;
  double min_eig = 0.0;
  std::size_t nearest_index = 0;
  double error = 0.0;
  double bound = 0.0;
  bool within = false;
  bool gap = false;  ///< gap_check at the terminal point; not part of the CSV
};

/// Descent from n_starts uniform points (start s uses stream (seed, s, 0)),
/// each terminal point certified and compared with the truth.
std::vector<SweepRow> landscape_sweep(const ComponentSet& truth, std::size_t n_starts,
                                      std::uint64_t seed, const DescentOptions& options = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace quartic
