#include "quartic/decompose.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "quartic/errors.hpp"
#include "quartic/geometry.hpp"
#include "quartic/parallel.hpp"
#include "quartic/random.hpp"

namespace quartic {

double off_component_ratio(VectorCRef w, VectorCRef u) {
  const double c = w.dot(u);
  if (!(std::abs(c) > 1e-300)) return std::numeric_limits<double>::infinity();
  return (w - c * u).norm() / std::abs(c);
}

TpmOutcome tpm(const Rank1SumTensor& t, VectorCRef w0, std::size_t iters,
               const TpmOptions& options) {
  detail::require_dim(t.dim(), static_cast<std::size_t>(w0.size()), "tpm");
  detail::require_unit(w0, kOperationUnitTolerance, "tpm");
  if (iters == 0) throw InvalidArgument("tpm: iteration count must be at least 1");
  if (options.reference != nullptr) {
    detail::require_dim(t.dim(), static_cast<std::size_t>(options.reference->size()), "tpm reference");
  }

  TpmOutcome out;
  Vector w = w0;
  if (options.reference != nullptr) out.ratio_trace.push_back(off_component_ratio(w, *options.reference));

  for (std::size_t it = 1; it <= iters; ++it) {
    const Vector image = contract_vector(t, w);
    const double norm = image.norm();
    if (!(norm > kDegenerateNorm)) {
      throw DegenerateIterate(fmt::format("tpm: |T(I,w,w,w)| = {:.3g} at iteration {}", norm, it));
    }
    Vector next = image / norm;
    const double lambda = contract_full(t, next);

    out.lambda_trace.push_back(lambda);
    if (options.reference != nullptr) {
      out.ratio_trace.push_back(off_component_ratio(next, *options.reference));
    }
    if (options.observer) options.observer(it, next, lambda);

    const double sign = next.dot(w) >= 0.0 ? 1.0 : -1.0;
    const bool settled = (next - sign * w).norm() <= kTpmSettleTolerance;
    w = std::move(next);
    out.weight = lambda;
    out.iterations = it;
    if (settled) break;
  }
  out.vector = std::move(w);
  return out;
}

std::size_t default_iteration_count(std::size_t k, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument(fmt::format("default_iteration_count: tau = {} outside (0, 1)", tau));
  }
  if (k == 0) throw InvalidArgument("default_iteration_count: k must be positive");
  const double raw = kIterationOffset +
                     kIterationSlope * std::log(1.0 / (std::sqrt(static_cast<double>(k)) * std::pow(tau, 4)));
  return static_cast<std::size_t>(std::ceil(std::max(raw, kIterationOffset)));
}

namespace {

struct RestartResult {
  TpmOutcome outcome;
  std::vector<TraceRow> rows;
};

std::vector<TraceRow> build_trace_rows(std::size_t round, std::size_t restart, const Vector& start,
                                       double start_lambda, const std::vector<Vector>& iterates,
                                       const std::vector<double>& lambdas, const ComponentSet* truth) {
  std::optional<Vector> reference;
  if (truth != nullptr && !iterates.empty()) {
    Eigen::Index best = 0;
    (truth->vectors().transpose() * iterates.back()).cwiseAbs().maxCoeff(&best);
    reference = truth->vector(static_cast<std::size_t>(best));
  }
  auto ratio_of = [&](const Vector& w) {
    return reference ? off_component_ratio(w, *reference) : std::numeric_limits<double>::quiet_NaN();
  };
  std::vector<TraceRow> rows;
  rows.reserve(iterates.size() + 1);
  rows.push_back({round, restart, 0, start_lambda, ratio_of(start)});
  for (std::size_t t = 0; t < iterates.size(); ++t) {
    rows.push_back({round, restart, t + 1, lambdas[t], ratio_of(iterates[t])});
  }
  return rows;
}

}  // namespace

TpmrResult tpmr(const Rank1SumTensor& t, std::size_t iters, std::size_t restarts, std::size_t k,
                std::uint64_t seed, const TpmrOptions& options) {
  if (restarts == 0) throw InvalidArgument("tpmr: need at least one restart");
  if (k == 0) throw InvalidArgument("tpmr: need k >= 1");
  if (iters == 0) throw InvalidArgument("tpmr: iteration count must be at least 1");
  if (options.truth != nullptr) {
    detail::require_dim(t.dim(), options.truth->dim(), "tpmr truth");
  }

  TpmrResult result;
  Rank1SumTensor current = t;
  for (std::size_t round = 0; round < k; ++round) {
    if (round > 0) {
      const auto& last = result.components.back();
      current = deflate(current, last.vector, last.weight);
    }

    std::vector<std::optional<RestartResult>> slots(restarts);
    parallel_for(restarts, options.threads, [&](std::size_t l) {
      Engine engine = stream_engine(seed, round, l);
      const Vector start = uniform_on_sphere(t.dim(), engine);
      std::vector<Vector> iterates;
      std::vector<double> lambdas;
      TpmOptions tpm_options;
      if (options.record_trace) {
        tpm_options.observer = [&](std::size_t, const Vector& w, double lambda) {
          iterates.push_back(w);
          lambdas.push_back(lambda);
        };
      }
      try {
        RestartResult r{tpm(current, start, iters, tpm_options), {}};
        if (options.record_trace) {
          r.rows = build_trace_rows(round, l, start, contract_full(current, start), iterates,
                                    lambdas, options.truth);
        }
        slots[l] = std::move(r);
      } catch (const DegenerateIterate&) {
        // Discarded; measure-zero event under uniform starts.
      }
    });

    std::optional<std::size_t> best;
    for (std::size_t l = 0; l < restarts; ++l) {
      if (!slots[l]) continue;
      if (!best || slots[l]->outcome.weight > slots[*best]->outcome.weight) best = l;
    }
    if (!best) {
      throw ExtractionFailure(
          round, fmt::format("tpmr: all {} restarts degenerated in round {}", restarts, round));
    }
    if (options.record_trace) {
      for (auto& slot : slots) {
        if (!slot) continue;
        result.trace.insert(result.trace.end(), slot->rows.begin(), slot->rows.end());
      }
    }
    auto& chosen = slots[*best]->outcome;
    result.components.push_back({std::move(chosen.vector), chosen.weight});
  }
  return result;
}

RestartPlan restart_conditions(std::uint64_t restarts, double eta, double tau, std::size_t dim,
                               std::size_t k) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument(fmt::format("restart_conditions: eta = {} outside (0, 1)", eta));
  if (!(tau >= 0.0 && tau < 1.0)) throw InvalidArgument(fmt::format("restart_conditions: tau = {} outside [0, 1)", tau));
  if (restarts < 2) throw InvalidArgument("restart_conditions: need L >= 2");
  if (dim == 0 || k == 0) throw InvalidArgument("restart_conditions: need d >= 1 and k >= 1");

  const double log_l = std::log(static_cast<double>(restarts));
  const double log_12 = std::log(12.0 / eta);
  const double log_3 = std::log(3.0 / eta);
  const double spread = 2.0 * (1.0 + tau * tau);

  RestartPlan plan;
  plan.restarts = restarts;
  plan.eta = eta;
  plan.a1 = 0.5 * std::sqrt(log_l) - std::sqrt(2.0 * log_12);
  plan.b1 = std::sqrt(spread * std::log(2.0 * static_cast<double>(k))) +
            tau * (std::sqrt(2.0 * (std::log(2.0) + log_l)) + std::sqrt(2.0 * log_12)) +
            std::sqrt(spread * log_3);
  plan.c1 = std::sqrt(3.0 * log_3 * static_cast<double>(dim) + 2.0 * log_3);
  plan.a1_at_least_2b1 = plan.a1 >= 2.0 * plan.b1;
  plan.a1_over_c1_at_least_tau = plan.a1 / plan.c1 >= tau;
  return plan;
}

std::optional<std::uint64_t> smallest_passing_count(std::uint64_t max_count,
                                                    const std::function<bool(std::uint64_t)>& passes) {
  std::uint64_t failing = 1;
  std::optional<std::uint64_t> feasible;
  for (std::uint64_t l = 2; l <= max_count;) {
    if (passes(l)) {
      feasible = l;
      break;
    }
    failing = l;
    if (l == max_count) break;
    l = l > max_count / 2 ? max_count : 2 * l;
  }
  if (!feasible) return std::nullopt;
  std::uint64_t hi = *feasible;
  std::uint64_t lo = failing;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

RestartPlan plan_restarts(double eta, double tau, std::size_t dim, std::size_t k,
                          std::uint64_t max_restarts) {
  if (max_restarts < 2) throw InvalidArgument("plan_restarts: L_max must be at least 2");
  // Validates the parameters before the search starts.
  const RestartPlan at_cap = restart_conditions(max_restarts, eta, tau, dim, k);
  const auto found = smallest_passing_count(max_restarts, [&](std::uint64_t l) {
    return restart_conditions(l, eta, tau, dim, k).conditions_met();
  });
  if (!found) {
    throw NoFeasibleRestarts(fmt::format(
        "plan_restarts: no L <= {} meets the restart conditions (at the cap: A1 = {:.6g}, "
        "2*B1 = {:.6g}, A1/C1 = {:.6g}, tau = {:.6g})",
        max_restarts, at_cap.a1, 2.0 * at_cap.b1, at_cap.a1 / at_cap.c1, tau));
  }
  return restart_conditions(*found, eta, tau, dim, k);
}

Json to_json(const RestartPlan& plan) {
  Json j;
  j["L"] = plan.restarts;
  j["eta"] = plan.eta;
  j["A1"] = plan.a1;
  j["B1"] = plan.b1;
  j["C1"] = plan.c1;
  j["conditions_met"] = {{"a1_at_least_2b1", plan.a1_at_least_2b1}, {"a1_over_c1_at_least_tau", plan.a1_over_c1_at_least_tau}};
  return j;
}

bool is_good_initialization(VectorCRef v, const ComponentSet& truth, std::size_t target) {
  detail::require_dim(truth.dim(), static_cast<std::size_t>(v.size()), "is_good_initialization");
  if (target >= truth.rank()) throw InvalidArgument("is_good_initialization: target out of range");
  const double tau = measure_incoherence(truth);
  const Vector c = truth.vectors().transpose() * v;
  const double lead = std::abs(c(static_cast<Eigen::Index>(target)));
  if (!(lead >= tau)) return false;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    if (static_cast<std::size_t>(j) == target) continue;
    if (!(lead >= 2.0 * std::abs(c(j)))) return false;
  }
  return true;
}

double good_initialization_rate(const ComponentSet& truth, std::size_t target,
                                std::uint64_t restarts, std::size_t trials, std::uint64_t seed) {
  if (target >= truth.rank()) throw InvalidArgument("good_initialization_rate: target out of range");
  if (restarts == 0 || trials == 0) throw InvalidArgument("good_initialization_rate: need L >= 1 and trials >= 1");
  const auto u = truth.vector(target);
  std::size_t good = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Engine engine = stream_engine(seed, trial, 0);
    Vector best;
    double best_corr = -1.0;
    for (std::uint64_t l = 0; l < restarts; ++l) {
      Vector v = uniform_on_sphere(truth.dim(), engine);
      const double corr = std::abs(v.dot(u));
      if (corr > best_corr) {
        best_corr = corr;
        best = std::move(v);
      }
    }
    if (is_good_initialization(best, truth, target)) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(trials);
}

double recovery_bound(double kappa, std::size_t k, double tau) {
  return kRecoveryConstant * kappa * std::sqrt(static_cast<double>(k)) * tau * tau * tau;
}

RecoveryReport match_components(std::span<const ExtractedComponent> estimates,
                                const ComponentSet& truth) {
  const std::size_t m = estimates.size();
  const std::size_t k = truth.rank();
  if (m > k) throw InvalidArgument(fmt::format("match_components: {} estimates for {} components", m, k));

  Matrix corr(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < m; ++i) {
    detail::require_dim(truth.dim(), static_cast<std::size_t>(estimates[i].vector.size()), "match_components");
    corr.row(static_cast<Eigen::Index>(i)) = (truth.vectors().transpose() * estimates[i].vector).transpose();
  }

  RecoveryReport report;
  report.assignment.assign(m, 0);
  std::vector<bool> estimate_done(m, false);
  std::vector<bool> truth_done(k, false);
  for (std::size_t step = 0; step < m; ++step) {
    double best = -1.0;
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (estimate_done[i]) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (truth_done[j]) continue;
        const double value = std::abs(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        if (value > best) {
          best = value;
          bi = i;
          bj = j;
        }
      }
    }
    estimate_done[bi] = true;
    truth_done[bj] = true;
    report.assignment[bi] = bj;
  }

  const double tau = measure_incoherence(truth);
  report.bound = recovery_bound(truth.kappa(), k, tau);
  report.all_within_bound = true;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = report.assignment[i];
    const double dot = corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    const int sign = dot >= 0.0 ? 1 : -1;
    const double vector_error = (estimates[i].vector - sign * truth.vector(j)).norm();
    const double weight_error = std::abs(estimates[i].weight - truth.weight(j));
    report.signs.push_back(sign);
    report.vector_errors.push_back(vector_error);
    report.weight_errors.push_back(weight_error);
    const bool ok = vector_error <= report.bound + kRoundoffAllowance &&
                    weight_error <= 5.0 * report.bound * truth.weight(j) + kRoundoffAllowance;
    report.all_within_bound = report.all_within_bound && ok;
  }
  return report;
}

Json to_json(const RecoveryReport& report) {
  Json j;
  j["assignment"] = report.assignment;
  j["signs"] = report.signs;
  j["vector_errors"] = report.vector_errors;
  j["weight_errors"] = report.weight_errors;
  j["bound"] = report.bound;
  j["all_within_bound"] = report.all_within_bound;
  return j;
}

double deflation_residual_norm(const ComponentSet& truth,
                               std::span<const ExtractedComponent> extracted, VectorCRef w) {
  if (extracted.size() > truth.rank()) {
    throw InvalidArgument(fmt::format("deflation_residual_norm: {} extracted pairs for {} components",
                                      extracted.size(), truth.rank()));
  }
  detail::require_dim(truth.dim(), static_cast<std::size_t>(w.size()), "deflation_residual_norm");
  Vector residual = Vector::Zero(w.size());
  for (std::size_t j = 0; j < extracted.size(); ++j) {
    const auto& e = extracted[j];
    detail::require_dim(truth.dim(), static_cast<std::size_t>(e.vector.size()), "deflation_residual_norm");
    detail::require_unit(e.vector, kOperationUnitTolerance, "deflation_residual_norm");
    const auto u = truth.vector(j);
    const double c = w.dot(u);
    const double c_hat = w.dot(e.vector);
    residual += (truth.weight(j) * c * c * c) * u - (e.weight * c_hat * c_hat * c_hat) * e.vector;
  }
  return residual.norm();
}

}  // namespace quartic
