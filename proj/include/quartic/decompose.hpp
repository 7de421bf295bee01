#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "quartic/io.hpp"
#include "quartic/tensor.hpp"

namespace quartic {

/// Constant in the recovery tolerance epsilon = 350 * kappa * sqrt(k) * tau^3.
inline constexpr double kRecoveryConstant = 350.0;
/// Ceiling on k*tau under which the deflated power-method guarantee is stated.
inline constexpr double kPowerMethodKTauLimit = 1e-3;
/// Absolute slack added to every recovery comparison. The tolerance above
/// collapses to zero for orthogonal components while computed estimates keep
/// roundoff error, so flags compare  error <= bound + kRoundoffAllowance.
inline constexpr double kRoundoffAllowance = 1e-8;

/// Power iterations stop early once consecutive (sign-aligned) iterates differ by this.
inline constexpr double kTpmSettleTolerance = 1e-13;
/// |T(I,w,w,w)| at or below this cannot be normalized.
inline constexpr double kDegenerateNorm = 1e-300;

/// Iteration-count model  ceil(50 + 20 * log(1 / (sqrt(k) tau^4))), never below 50.
inline constexpr double kIterationOffset = 50.0;
inline constexpr double kIterationSlope = 20.0;

struct TpmOutcome {
  Vector vector;                     ///< w_T, unit norm
  double weight = 0.0;               ///< lambda_T = T(w_T, w_T, w_T, w_T)
  std::size_t iterations = 0;        ///< iterations actually run
  std::vector<double> ratio_trace;   ///< r_0..r_T against the reference, if one was given
  std::vector<double> lambda_trace;  ///< lambda_1..lambda_T
};

/// Called after each iteration with (t, w_t, lambda_t).
using IterateObserver = std::function<void(std::size_t, const Vector&, double)>;

struct TpmOptions {
  /// Component the ratio trace r_t = |P_{u perp} w_t| / |w_t^T u| is measured against.
  const Vector* reference = nullptr;
  IterateObserver observer;
};

/// Tensor power method:
///   w_t = T(I, w_{t-1}, w_{t-1}, w_{t-1}) / |T(I, w_{t-1}, w_{t-1}, w_{t-1})|
///   lambda_t = T(w_t, w_t, w_t, w_t)
/// for at most `iters` steps. Throws DegenerateIterate when the contraction vanishes.
TpmOutcome tpm(const Rank1SumTensor& t, VectorCRef w0, std::size_t iters,
               const TpmOptions& options = {});

/// |w - (w^T u) u| / |w^T u|; +infinity when |w^T u| <= 1e-300.
double off_component_ratio(VectorCRef w, VectorCRef u);

std::size_t default_iteration_count(std::size_t k, double tau);

struct ExtractedComponent {
  Vector vector;
  double weight = 0.0;
};

/// One row of the per-iteration trace; iteration 0 is the random start.
struct TraceRow {
  std::size_t round = 0;
  std::size_t restart = 0;
  std::size_t iteration = 0;
  double lambda = 0.0;
  double ratio = 0.0;  ///< NaN when no ground truth was supplied
};

struct TpmrOptions {
  /// Worker threads for the restarts of one round (0 = hardware concurrency).
  std::size_t threads = 1;
  bool record_trace = false;
  /// Ground truth for the trace's ratio column. The reference of each restart is
  /// the component best correlated with its terminal vector.
  const ComponentSet* truth = nullptr;
};

struct TpmrResult {
  std::vector<ExtractedComponent> components;  ///< in extraction order
  std::vector<TraceRow> trace;
};

/// Power method with random restarts and deflation. Round i deflates every pair
/// extracted so far, runs tpm from `restarts` uniform starts drawn from stream
/// (seed, i, l), and keeps the candidate with the largest lambda (lowest restart
/// index on ties). Degenerate restarts are discarded; a round with none left
/// throws ExtractionFailure. Output does not depend on `threads`.
TpmrResult tpmr(const Rank1SumTensor& t, std::size_t iters, std::size_t restarts, std::size_t k,
                std::uint64_t seed, const TpmrOptions& options = {});

/// Restart-count conditions for a good initialization with probability 1 - eta:
///   A1 = 0.5 sqrt(log L) - sqrt(2 log(12/eta))
///   B1 = sqrt(2(1+tau^2) log(2k)) + tau (sqrt(2 log(2L)) + sqrt(2 log(12/eta)))
///        + sqrt(2(1+tau^2) log(3/eta))
///   C1 = sqrt(3 log(3/eta) d + 2 log(3/eta))
/// with a1_at_least_2b1: A1 >= 2 B1 and a1_over_c1_at_least_tau: A1 / C1 >= tau.
struct RestartPlan {
  std::uint64_t restarts = 0;
  double eta = 0.0;
  double a1 = 0.0;
  double b1 = 0.0;
  double c1 = 0.0;
  bool a1_at_least_2b1 = false;
  bool a1_over_c1_at_least_tau = false;

  bool conditions_met() const noexcept { return a1_at_least_2b1 && a1_over_c1_at_least_tau; }
};

RestartPlan restart_conditions(std::uint64_t restarts, double eta, double tau, std::size_t dim,
                               std::size_t k);

/// Smallest count in [2, max_count] accepted by `passes`: doubling from 2, then
/// bisection inside the first bracket (failing, passing]. Exact when `passes` is
/// monotone; otherwise the first passing count of the bracket found.
std::optional<std::uint64_t> smallest_passing_count(std::uint64_t max_count,
                                                    const std::function<bool(std::uint64_t)>& passes);

/// Smallest L <= max_restarts meeting both conditions, found by
/// smallest_passing_count. Throws NoFeasibleRestarts.
RestartPlan plan_restarts(double eta, double tau, std::size_t dim, std::size_t k,
                          std::uint64_t max_restarts);

Json to_json(const RestartPlan& plan);

/// |v^T u_target| >= tau and |v^T u_target| >= 2 |v^T u_j| for every j != target,
/// where tau is the measured incoherence of `truth`.
bool is_good_initialization(VectorCRef v, const ComponentSet& truth, std::size_t target);

/// Fraction of `trials` best-of-L draws (the sample maximizing |v^T u_target|)
/// that pass is_good_initialization. Trial i draws from stream (seed, i, 0).
double good_initialization_rate(const ComponentSet& truth, std::size_t target,
                                std::uint64_t restarts, std::size_t trials, std::uint64_t seed);

struct RecoveryReport {
  std::vector<std::size_t> assignment;  ///< estimate index -> truth index
  std::vector<int> signs;
  std::vector<double> vector_errors;  ///< |u_hat_i - s_i u_{pi(i)}|
  std::vector<double> weight_errors;  ///< |lambda_hat_i - lambda_{pi(i)}|
  double bound = 0.0;                 ///< 350 * kappa * sqrt(k) * tau^3
  /// vector_errors <= bound and weight_errors <= 5 * bound * lambda_{pi(i)},
  /// each with kRoundoffAllowance added.
  bool all_within_bound = false;
};

double recovery_bound(double kappa, std::size_t k, double tau);

/// Greedy matching by descending |u_hat_i^T u_j| over unmatched pairs; the sign
/// is that of u_hat_i^T u_{pi(i)}, +1 on an exact zero.
RecoveryReport match_components(std::span<const ExtractedComponent> estimates,
                                const ComponentSet& truth);

Json to_json(const RecoveryReport& report);

/// | sum_j [lambda_j (w^T u_j)^3 u_j - lambda_hat_j (w^T u_hat_j)^3 u_hat_j] |
/// over j < extracted.size(); extracted[j] is paired with truth component j.
double deflation_residual_norm(const ComponentSet& truth,
                               std::span<const ExtractedComponent> extracted, VectorCRef w);

}  // namespace quartic
