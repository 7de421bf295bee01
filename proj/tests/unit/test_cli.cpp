#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "quartic/cli.hpp"
#include "quartic/decompose.hpp"
#include "quartic/errors.hpp"
#include "support.hpp"

using namespace quartic;
using namespace quartic::cli;
using testing_support::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "quartic");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

ExperimentConfig orthonormal_config() {
  ExperimentConfig c;
  c.d = 8;
  c.k = 4;
  c.component_model = ComponentModel::orthonormal;
  c.seed = 3;
  c.restarts = 32;
  return c;
}

}  // namespace

TEST(Config, DefaultsAndJsonRoundTrip) {
  const ExperimentConfig defaults;
  EXPECT_EQ(defaults.weights.lo, 1.0);
  EXPECT_EQ(defaults.weights.hi, 1.25);
  EXPECT_EQ(defaults.eta, 0.1);
  EXPECT_FALSE(defaults.restarts.has_value());

  ExperimentConfig c = orthonormal_config();
  c.iters = 120;
  c.weights = {0.5, 2.0};
  const ExperimentConfig back = config_from_json(Json::parse(dump(to_json(c))));
  EXPECT_EQ(dump(to_json(back)), dump(to_json(c)));
  EXPECT_EQ(back.restarts, std::optional<std::uint64_t>(32));
  EXPECT_EQ(back.iters, std::optional<std::size_t>(120));
  EXPECT_EQ(back.component_model, ComponentModel::orthonormal);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"dimension": 4})")), InvalidArgument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"d": "four"})")), InvalidArgument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"weight_range": [1]})")), InvalidArgument);
  EXPECT_THROW(config_from_json(Json::parse(R"({"component_model": "sparse"})")), InvalidArgument);
  EXPECT_THROW(config_from_json(Json::parse("[1, 2]")), InvalidArgument);

  ExperimentConfig c;
  c.weights = {1.5, 1.0};
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.weights = {0.0, 1.0};
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.eta = 1.0;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.restarts = 0;
  EXPECT_THROW(validate(c), InvalidArgument);
}

TEST(Config, ComponentModels) {
  EXPECT_EQ(parse_component_model("gaussian-unit"), ComponentModel::gaussian_unit);
  EXPECT_EQ(to_string(ComponentModel::explicit_file), "explicit-file");

  ExperimentConfig c = orthonormal_config();
  c.k = 9;
  EXPECT_THROW(make_components(c), InvalidArgument);

  TempDir dir("models");
  c = orthonormal_config();
  const ComponentSet set = make_components(c);
  write_component_set(dir / "set.json", set);
  ExperimentConfig from_file;
  from_file.component_model = ComponentModel::explicit_file;
  from_file.components_file = dir / "set.json";
  EXPECT_EQ(make_components(from_file).vectors(), set.vectors());
  from_file.components_file.clear();
  EXPECT_THROW(make_components(from_file), InvalidArgument);
}

TEST(CmdGen, OrthonormalReportAndDeterminism) {
  TempDir dir("gen");
  std::ostringstream log;
  ASSERT_EQ(cmd_gen(orthonormal_config(), dir / "a.json", log), exit_code::ok);
  const Json report = Json::parse(log.str());
  EXPECT_LE(report["tau"].get<double>(), 1e-15);
  EXPECT_LE(report["delta"].get<double>(), 1e-12);

  ExperimentConfig g;
  g.d = 400;
  g.k = 20;
  g.seed = 17;
  std::ostringstream ignored;
  cmd_gen(g, dir / "g1.json", ignored);
  cmd_gen(g, dir / "g2.json", ignored);
  EXPECT_EQ(slurp(dir / "g1.json"), slurp(dir / "g2.json"));
  const ComponentSet set = read_component_set(dir / "g1.json");
  EXPECT_EQ(set.dim(), 400u);
  EXPECT_GE(set.weights().minCoeff(), 1.0);
  EXPECT_LE(set.weights().maxCoeff(), 1.25);
}

TEST(CmdDecompose, OrthonormalRecoveryAndTrace) {
  TempDir dir("decompose");
  std::ostringstream log;
  cmd_gen(orthonormal_config(), dir / "set.json", log);
  const int code = cmd_decompose(orthonormal_config(), dir / "set.json", dir / "report.json", dir / "trace.csv", log);
  EXPECT_EQ(code, exit_code::ok);

  const Json report = read_json_file(dir / "report.json");
  EXPECT_TRUE(report["recovery"]["all_within_bound"].get<bool>());
  for (double e : report["recovery"]["vector_errors"]) EXPECT_LE(e, 1e-8);
  for (double e : report["recovery"]["weight_errors"]) EXPECT_LE(e, 1e-8);
  EXPECT_EQ(report["L"].get<std::uint64_t>(), 32u);
  EXPECT_EQ(report["estimates"].size(), 4u);

  const std::string trace = slurp(dir / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "round,restart,iteration,lambda,ratio");
  EXPECT_NE(trace.find("\n3,31,0,"), std::string::npos);
}

TEST(CmdDecompose, ReportsAreByteIdentical) {
  TempDir dir("determinism");
  ExperimentConfig c;
  c.d = 120;
  c.k = 6;
  c.seed = 5;
  c.restarts = 10;
  c.threads = 2;
  std::ostringstream log;
  cmd_gen(c, dir / "set.json", log);
  cmd_decompose(c, dir / "set.json", dir / "a.json", dir / "a.csv", log);
  c.threads = 1;
  cmd_decompose(c, dir / "set.json", dir / "b.json", dir / "b.csv", log);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  // The config echo differs in the thread count only.
  Json a = read_json_file(dir / "a.json");
  Json b = read_json_file(dir / "b.json");
  a["config"].erase("threads");
  b["config"].erase("threads");
  EXPECT_EQ(dump(a), dump(b));
}

TEST(CmdDecompose, MissingRestartCountNeedsThePlanner) {
  TempDir dir("plan");
  ExperimentConfig c = orthonormal_config();
  std::ostringstream log;
  cmd_gen(c, dir / "set.json", log);
  c.restarts.reset();
  EXPECT_THROW(cmd_decompose(c, dir / "set.json", dir / "r.json", std::nullopt, log), NoFeasibleRestarts);
  EXPECT_FALSE(std::filesystem::exists(dir / "r.json"));
}

TEST(CmdLandscape, OrthonormalMinimaAndEmptySweep) {
  TempDir dir("landscape");
  ExperimentConfig c = orthonormal_config();
  c.n_starts = 12;
  std::ostringstream log;
  cmd_gen(c, dir / "set.json", log);
  ASSERT_EQ(cmd_landscape(c, dir / "set.json", dir / "sweep.csv", log), exit_code::ok);
  std::istringstream csv(slurp(dir / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_NE(line.find(",minimum,"), std::string::npos);
    const auto fields_end = line.rfind(',');
    const auto bound_start = line.rfind(',', fields_end - 1);
    const auto error_start = line.rfind(',', bound_start - 1);
    EXPECT_LE(std::stod(line.substr(error_start + 1, bound_start - error_start - 1)), 1e-6);
  }
  EXPECT_EQ(rows, 12);

  c.n_starts = 0;
  cmd_landscape(c, dir / "set.json", dir / "empty.csv", log);
  EXPECT_EQ(slurp(dir / "empty.csv"),
            "seed,d,k,tau,delta,kappa,point_kind,gradient_norm,min_eig,nearest_index,error,bound,within\n");
}

TEST(CmdPlan, InfeasibleAndTauSources) {
  TempDir dir("plan");
  ExperimentConfig c;
  c.d = 400;
  c.k = 20;
  std::ostringstream log;
  EXPECT_EQ(cmd_plan(c, std::nullopt, 0.12, dir / "plan.json", log), exit_code::planning_infeasible);
  const Json plan = read_json_file(dir / "plan.json");
  EXPECT_FALSE(plan["feasible"].get<bool>());
  EXPECT_EQ(plan["plan"]["eta"].get<double>(), 0.1 / 20.0);
  EXPECT_THROW(cmd_plan(c, std::nullopt, std::nullopt, std::nullopt, log), InvalidArgument);
}

TEST(CmdSelftest, PassesAndCatchesCorruptedContraction) {
  std::ostringstream log;
  EXPECT_EQ(cmd_selftest(log), exit_code::ok);
  EXPECT_EQ(log.str().find("FAIL"), std::string::npos);

  SelftestHooks corrupted = library_contractions();
  corrupted.contract_full = [](const Rank1SumTensor& t, VectorCRef w) { return contract_full(t, w) * (1.0 + 1e-6); };
  std::ostringstream bad;
  EXPECT_EQ(cmd_selftest(bad, corrupted), exit_code::invariant_failure);
  EXPECT_NE(bad.str().find("FAIL oracle-equivalence"), std::string::npos);

  SelftestHooks dropped_term = library_contractions();
  dropped_term.contract_vector = [](const Rank1SumTensor& t, VectorCRef w) {
    const Vector c = t.directions().transpose() * w;
    // Squares instead of cubes the correlations.
    return Vector(t.directions() * (t.coefficients().array() * c.array().square()).matrix());
  };
  std::ostringstream bad_vector;
  EXPECT_EQ(cmd_selftest(bad_vector, dropped_term), exit_code::invariant_failure);
}

TEST(Run, ExitCodes) {
  TempDir dir("run");
  const std::string set = (dir / "set.json").string();
  EXPECT_EQ(run_args({"gen", "-d", "8", "-k", "4", "--model", "orthonormal", "--seed", "2", "--out", set}), exit_code::ok);
  EXPECT_EQ(run_args({"decompose", "--components", set, "-L", "16", "--out", (dir / "r.json").string()}), exit_code::ok);
  EXPECT_EQ(run_args({"decompose", "--components", set, "--out", (dir / "r.json").string()}),
            exit_code::planning_infeasible);
  EXPECT_EQ(run_args({"plan", "--tau", "0.9", "-d", "100", "-k", "5", "--max-restarts", "64"}),
            exit_code::planning_infeasible);
  EXPECT_EQ(run_args({"gen", "-d", "4", "-k", "8", "--out", set}), exit_code::bad_input);
  EXPECT_EQ(run_args({"gen", "--model", "sparse", "--out", set}), exit_code::bad_input);
  EXPECT_EQ(run_args({"decompose", "--components", (dir / "missing.json").string(), "--out", set}), exit_code::bad_input);
  EXPECT_EQ(run_args({"bogus"}), exit_code::bad_input);
  EXPECT_EQ(run_args({"decompose", "--components", set, "--eta", "2", "-L", "4", "--out", (dir / "r.json").string()}),
            exit_code::bad_input);

  std::ofstream(dir / "config.json") << R"({"d": 6, "k": 2, "component_model": "orthonormal", "seed": 9})";
  EXPECT_EQ(run_args({"gen", "--config", (dir / "config.json").string(), "--out", set}), exit_code::ok);
  EXPECT_EQ(read_component_set(set).dim(), 6u);
  EXPECT_EQ(run_args({"gen", "--config", (dir / "config.json").string(), "-d", "7", "--out", set}), exit_code::ok);
  EXPECT_EQ(read_component_set(set).dim(), 7u);
}
