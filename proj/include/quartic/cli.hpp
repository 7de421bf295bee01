#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "quartic/generate.hpp"
#include "quartic/io.hpp"
#include "quartic/tensor.hpp"

namespace quartic::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int invariant_failure = 1;
inline constexpr int extraction_failure = 2;
inline constexpr int planning_infeasible = 3;
inline constexpr int bad_input = 4;
}  // namespace exit_code

enum class ComponentModel { orthonormal, gaussian_unit, explicit_file };

std::string_view to_string(ComponentModel model);
/// "orthonormal", "gaussian-unit" or "explicit-file"; throws InvalidArgument otherwise.
ComponentModel parse_component_model(std::string_view name);

struct ExperimentConfig {
  std::size_t d = 0;
  std::size_t k = 0;
  WeightRange weights{1.0, 1.25};
  ComponentModel component_model = ComponentModel::gaussian_unit;
  std::filesystem::path components_file;  ///< source for the explicit-file model
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> restarts;  ///< L; planned when absent
  std::optional<std::size_t> iters;       ///< default_iteration_count when absent
  double eta = 0.1;                       ///< total failure budget; each round gets eta / k
  std::uint64_t max_restarts = std::uint64_t{1} << 20;
  std::size_t n_starts = 25;
  double step = 0.1;
  std::size_t threads = 1;
};

/// Reads the keys of to_json(ExperimentConfig); absent keys keep their defaults.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& config);

/// Throws InvalidArgument on weight_lo <= 0, weight_lo > weight_hi, eta outside
/// (0, 1), a non-positive step, or zero restarts / iterations when given.
void validate(const ExperimentConfig& config);

/// Instance described by the config. Throws InvalidArgument when k > d.
ComponentSet make_components(const ExperimentConfig& config);

/// Writes the ComponentSet JSON to `out` and prints its ConditioningReport.
int cmd_gen(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Builds the tensor, plans L when the config has none, runs tpmr, matches the
/// estimates against the input and writes the report JSON (and the per-iteration
/// trace CSV when `trace` is given). Returns exit_code::ok iff all_within_bound.
int cmd_decompose(const ExperimentConfig& config, const std::filesystem::path& components,
                  const std::filesystem::path& out,
                  const std::optional<std::filesystem::path>& trace, std::ostream& log);

/// Runs config.n_starts descents and writes the sweep CSV.
int cmd_landscape(const ExperimentConfig& config, const std::filesystem::path& components,
                  const std::filesystem::path& out, std::ostream& log);

/// Plans L at per-round budget eta / k, with tau measured from `components` when
/// given and taken from `tau` otherwise. On infeasibility the conditions at
/// max_restarts are written and exit_code::planning_infeasible is returned.
int cmd_plan(const ExperimentConfig& config,
             const std::optional<std::filesystem::path>& components, std::optional<double> tau,
             const std::optional<std::filesystem::path>& out, std::ostream& log);

/// Contractions checked by the self-test against the dense oracle. Replacing
/// them lets a test confirm that a corrupted contraction is caught.
struct SelftestHooks {
  std::function<double(const Rank1SumTensor&, VectorCRef)> contract_full;
  std::function<Vector(const Rank1SumTensor&, VectorCRef)> contract_vector;
};

SelftestHooks library_contractions();

/// Oracle equivalence, finite-difference derivative checks and the analytic
/// certificate fixtures; one PASS/FAIL line each.
int cmd_selftest(std::ostream& log, const SelftestHooks& hooks = library_contractions());

/// Parses argv (subcommands gen, decompose, landscape, plan, selftest) and maps
/// library errors to exit codes.
int run(int argc, char** argv);

}  // namespace quartic::cli
