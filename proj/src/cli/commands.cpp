#include <algorithm>
#include <cfloat>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "quartic/cli.hpp"
#include "quartic/decompose.hpp"
#include "quartic/errors.hpp"
#include "quartic/geometry.hpp"
#include "quartic/landscape.hpp"

namespace quartic::cli {

namespace {

// Measured tau is exactly 0 for an orthonormal set, outside the iteration-count
// model's domain; nudge it into (0, 1).
double clamp_tau(double tau) { return std::clamp(tau, DBL_EPSILON, 1.0 - DBL_EPSILON); }

double per_round_eta(const ExperimentConfig& c, std::size_t k) { return c.eta / static_cast<double>(k); }

Json estimates_json(const std::vector<ExtractedComponent>& estimates) {
  Json out = Json::array();
  for (const auto& e : estimates) {
    Json row;
    row["weight"] = e.weight;
    Json v = Json::array();
    for (Eigen::Index a = 0; a < e.vector.size(); ++a) v.push_back(e.vector(a));
    row["vector"] = std::move(v);
    out.push_back(std::move(row));
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << "round,restart,iteration,lambda,ratio\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{:.17g},{:.17g}\n", r.round, r.restart, r.iteration, r.lambda, r.ratio);
  }
  return out.str();
}

}  // namespace

int cmd_gen(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log) {
  const ComponentSet components = make_components(config);
  write_component_set(out, components);
  log << dump(to_json(conditioning_report(components)));
  return exit_code::ok;
}

int cmd_decompose(const ExperimentConfig& config, const std::filesystem::path& components,
                  const std::filesystem::path& out,
                  const std::optional<std::filesystem::path>& trace, std::ostream& log) {
  validate(config);
  const ComponentSet truth = read_component_set(components);
  const Rank1SumTensor t = build_tensor(truth);
  const ConditioningReport cond = conditioning_report(truth);
  const std::size_t k = truth.rank();

  Json report;
  report["config"] = to_json(config);
  report["conditioning"] = to_json(cond);

  std::uint64_t restarts = 0;
  if (config.restarts) {
    restarts = *config.restarts;
  } else {
    const RestartPlan plan =
        plan_restarts(per_round_eta(config, k), cond.tau, truth.dim(), k, config.max_restarts);
    restarts = plan.restarts;
    report["restart_plan"] = to_json(plan);
  }
  const std::size_t iters = config.iters ? *config.iters : default_iteration_count(k, clamp_tau(cond.tau));
  report["L"] = restarts;
  report["iters"] = iters;

  TpmrOptions options;
  options.threads = config.threads;
  options.record_trace = trace.has_value();
  options.truth = &truth;
  const TpmrResult result = tpmr(t, iters, restarts, k, config.seed, options);
  const RecoveryReport recovery = match_components(result.components, truth);
  report["recovery"] = to_json(recovery);
  report["estimates"] = estimates_json(result.components);

  write_text_file(out, dump(report));
  if (trace) write_text_file(*trace, trace_csv(result.trace));

  const double worst = recovery.vector_errors.empty()
                           ? 0.0
                           : *std::max_element(recovery.vector_errors.begin(), recovery.vector_errors.end());
  fmt::print(log, "decompose: k={} L={} iters={} max vector error {:.3g} (bound {:.3g}) -> {}\n", k,
             restarts, iters, worst, recovery.bound,
             recovery.all_within_bound ? "within bound" : "OUTSIDE bound");
  return recovery.all_within_bound ? exit_code::ok : exit_code::invariant_failure;
}

int cmd_landscape(const ExperimentConfig& config, const std::filesystem::path& components,
                  const std::filesystem::path& out, std::ostream& log) {
  validate(config);
  const ComponentSet truth = read_component_set(components);
  DescentOptions options;
  options.step = config.step;
  options.threads = config.threads;
  const auto rows = landscape_sweep(truth, config.n_starts, config.seed, options);

  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_text_file(out, csv.str());

  std::size_t minima = 0, within = 0, stalled = 0;
  for (const auto& r : rows) {
    if (r.point_kind == "stalled") ++stalled;
    if (r.point_kind != "minimum") continue;
    ++minima;
    if (r.within) ++within;
  }
  fmt::print(log, "landscape: {} starts, {} minima ({} within bound), {} stalled\n", rows.size(),
             minima, within, stalled);
  return exit_code::ok;
}

int cmd_plan(const ExperimentConfig& config,
             const std::optional<std::filesystem::path>& components, std::optional<double> tau,
             const std::optional<std::filesystem::path>& out, std::ostream& log) {
  validate(config);
  std::size_t dim = config.d;
  std::size_t k = config.k;
  if (components) {
    const ComponentSet truth = read_component_set(*components);
    dim = truth.dim();
    k = truth.rank();
    tau = measure_incoherence(truth);
  }
  if (!tau) throw InvalidArgument("plan: give --components or --tau");
  if (dim == 0 || k == 0) throw InvalidArgument("plan: need d >= 1 and k >= 1");

  const double eta = per_round_eta(config, k);
  Json j;
  j["d"] = dim;
  j["k"] = k;
  j["tau"] = *tau;
  int code = exit_code::ok;
  try {
    j["plan"] = to_json(plan_restarts(eta, *tau, dim, k, config.max_restarts));
    j["feasible"] = true;
  } catch (const NoFeasibleRestarts& e) {
    j["plan"] = to_json(restart_conditions(config.max_restarts, eta, *tau, dim, k));
    j["feasible"] = false;
    log << e.what() << "\n";
    code = exit_code::planning_infeasible;
  }
  if (out) {
    write_text_file(*out, dump(j));
  } else {
    log << dump(j);
  }
  return code;
}

namespace {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> d, k;
  std::optional<double> weight_lo, weight_hi;
  std::optional<std::string> model;
  std::optional<std::string> components_file;
  std::optional<std::uint64_t> restarts, max_restarts;
  std::optional<std::size_t> iters, n_starts, threads;
  std::optional<double> eta, step;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config; flags override its values")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Random seed");
}

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config_path ? config_from_json(read_json_file(*o.config_path)) : ExperimentConfig{};
  if (o.seed) c.seed = *o.seed;
  if (o.d) c.d = *o.d;
  if (o.k) c.k = *o.k;
  if (o.weight_lo) c.weights.lo = *o.weight_lo;
  if (o.weight_hi) c.weights.hi = *o.weight_hi;
  if (o.model) c.component_model = parse_component_model(*o.model);
  if (o.components_file) c.components_file = *o.components_file;
  if (o.restarts) c.restarts = *o.restarts;
  if (o.max_restarts) c.max_restarts = *o.max_restarts;
  if (o.iters) c.iters = *o.iters;
  if (o.n_starts) c.n_starts = *o.n_starts;
  if (o.threads) c.threads = *o.threads;
  if (o.eta) c.eta = *o.eta;
  if (o.step) c.step = *o.step;
  return c;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Fourth-order tensor decomposition by deflated power iterations, with landscape checks"};
  app.require_subcommand(1);

  Overrides o;
  std::string out;
  std::string components;
  std::optional<std::string> trace;
  std::optional<std::string> plan_out;
  std::optional<std::string> plan_components;
  std::optional<double> tau;

  auto* gen = app.add_subcommand("gen", "Generate a component set and print its conditioning");
  add_common(gen, o);
  gen->add_option("-d,--dim", o.d, "Dimension");
  gen->add_option("-k,--rank", o.k, "Number of components");
  gen->add_option("--weight-lo", o.weight_lo, "Lower end of the weight range");
  gen->add_option("--weight-hi", o.weight_hi, "Upper end of the weight range");
  gen->add_option("--model", o.model, "orthonormal | gaussian-unit | explicit-file");
  gen->add_option("--components-file", o.components_file, "Input for the explicit-file model");
  gen->add_option("--out", out, "Component set JSON")->required();

  auto* decompose = app.add_subcommand("decompose", "Run the restarted power method and score it");
  add_common(decompose, o);
  add_run_options(decompose, o);
  decompose->add_option("--components", components, "Component set JSON")->required()->check(CLI::ExistingFile);
  decompose->add_option("-L,--restarts", o.restarts, "Restarts per round (planned when omitted)");
  decompose->add_option("--max-restarts", o.max_restarts, "Upper limit for the restart planner");
  decompose->add_option("--iters", o.iters, "Power iterations per restart");
  decompose->add_option("--eta", o.eta, "Total failure probability; each round gets eta/k");
  decompose->add_option("--trace", trace, "Per-iteration trace CSV");
  decompose->add_option("--out", out, "Report JSON")->required();

  auto* landscape = app.add_subcommand("landscape", "Gradient descent sweep with certified end points");
  add_common(landscape, o);
  add_run_options(landscape, o);
  landscape->add_option("--components", components, "Component set JSON")->required()->check(CLI::ExistingFile);
  landscape->add_option("--n-starts", o.n_starts, "Number of descent starts");
  landscape->add_option("--step", o.step, "Initial step size");
  landscape->add_option("--out", out, "Sweep CSV")->required();

  auto* plan = app.add_subcommand("plan", "Smallest restart count meeting the initialization conditions");
  add_common(plan, o);
  plan->add_option("--components", plan_components, "Measure tau, d and k from this component set")
      ->check(CLI::ExistingFile);
  plan->add_option("--tau", tau, "Incoherence, when no component set is given");
  plan->add_option("-d,--dim", o.d, "Dimension");
  plan->add_option("-k,--rank", o.k, "Number of components");
  plan->add_option("--eta", o.eta, "Total failure probability; each round gets eta/k");
  plan->add_option("--max-restarts", o.max_restarts, "Largest L considered");
  plan->add_option("--out", plan_out, "Plan JSON (stdout when omitted)");

  auto* selftest = app.add_subcommand("selftest", "Oracle, derivative and fixture checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::bad_input;
  }

  try {
    if (selftest->parsed()) return cmd_selftest(std::cout);
    const ExperimentConfig config = resolve(o);
    if (gen->parsed()) return cmd_gen(config, out, std::cout);
    if (decompose->parsed()) {
      return cmd_decompose(config, components, out,
                           trace ? std::optional<std::filesystem::path>(*trace) : std::nullopt, std::cout);
    }
    if (landscape->parsed()) return cmd_landscape(config, components, out, std::cout);
    if (plan->parsed()) {
      return cmd_plan(config,
                      plan_components ? std::optional<std::filesystem::path>(*plan_components) : std::nullopt,
                      tau, plan_out ? std::optional<std::filesystem::path>(*plan_out) : std::nullopt,
                      std::cout);
    }
  } catch (const ExtractionFailure& e) {
    fmt::print(std::cerr, "error: extraction failed in round {}: {}\n", e.round(), e.what());
    return exit_code::extraction_failure;
  } catch (const NoFeasibleRestarts& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return exit_code::planning_infeasible;
  } catch (const InvalidArgument& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return exit_code::bad_input;
  } catch (const DegenerateComponents& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return exit_code::bad_input;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return exit_code::invariant_failure;
  }
  return exit_code::bad_input;
}

}  // namespace quartic::cli
