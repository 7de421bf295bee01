#include <array>
#include <string>

#include <fmt/format.h>

#include "quartic/cli.hpp"
#include "quartic/errors.hpp"

namespace quartic::cli {

namespace {

constexpr std::array kKnownKeys = {"d",   "k",     "weight_range", "component_model", "components_file",
                                   "seed", "L",    "iters",        "eta",             "L_max",
                                   "n_starts", "step", "threads"};

template <typename T>
void read_if_present(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

template <typename T>
void read_optional(const Json& j, const char* key, std::optional<T>& field) {
  if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<T>();
}

}  // namespace

std::string_view to_string(ComponentModel model) {
  switch (model) {
    case ComponentModel::orthonormal:
      return "orthonormal";
    case ComponentModel::gaussian_unit:
      return "gaussian-unit";
    case ComponentModel::explicit_file:
      return "explicit-file";
  }
  return "gaussian-unit";
}

ComponentModel parse_component_model(std::string_view name) {
  if (name == "orthonormal") return ComponentModel::orthonormal;
  if (name == "gaussian-unit") return ComponentModel::gaussian_unit;
  if (name == "explicit-file") return ComponentModel::explicit_file;
  throw InvalidArgument(fmt::format(
      "unknown component model '{}' (expected orthonormal, gaussian-unit or explicit-file)", name));
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) throw InvalidArgument(fmt::format("config: unknown key '{}'", key));
  }
  ExperimentConfig c;
  try {
    read_if_present(j, "d", c.d);
    read_if_present(j, "k", c.k);
    if (j.contains("weight_range")) {
      const auto& range = j.at("weight_range");
      if (!range.is_array() || range.size() != 2) {
        throw InvalidArgument("config: weight_range must be [lo, hi]");
      }
      c.weights = {range[0].get<double>(), range[1].get<double>()};
    }
    if (j.contains("component_model")) {
      c.component_model = parse_component_model(j.at("component_model").get<std::string>());
    }
    if (j.contains("components_file")) c.components_file = j.at("components_file").get<std::string>();
    read_if_present(j, "seed", c.seed);
    read_optional(j, "L", c.restarts);
    read_optional(j, "iters", c.iters);
    read_if_present(j, "eta", c.eta);
    read_if_present(j, "L_max", c.max_restarts);
    read_if_present(j, "n_starts", c.n_starts);
    read_if_present(j, "step", c.step);
    read_if_present(j, "threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("config: {}", e.what()));
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["d"] = c.d;
  j["k"] = c.k;
  j["weight_range"] = {c.weights.lo, c.weights.hi};
  j["component_model"] = std::string(to_string(c.component_model));
  if (c.component_model == ComponentModel::explicit_file) {
    j["components_file"] = c.components_file.generic_string();
  }
  j["seed"] = c.seed;
  j["L"] = c.restarts ? Json(*c.restarts) : Json(nullptr);
  j["iters"] = c.iters ? Json(*c.iters) : Json(nullptr);
  j["eta"] = c.eta;
  j["L_max"] = c.max_restarts;
  j["n_starts"] = c.n_starts;
  j["step"] = c.step;
  j["threads"] = c.threads;
  return j;
}

void validate(const ExperimentConfig& c) {
  if (!(c.weights.lo > 0.0) || !(c.weights.lo <= c.weights.hi)) {
    throw InvalidArgument(
        fmt::format("weight range [{}, {}] must satisfy 0 < lo <= hi", c.weights.lo, c.weights.hi));
  }
  if (!(c.eta > 0.0 && c.eta < 1.0)) throw InvalidArgument(fmt::format("eta = {} must lie in (0, 1)", c.eta));
  if (!(c.step > 0.0)) throw InvalidArgument(fmt::format("step = {} must be positive", c.step));
  if (c.restarts && *c.restarts == 0) throw InvalidArgument("L must be at least 1");
  if (c.iters && *c.iters == 0) throw InvalidArgument("iters must be at least 1");
  if (c.max_restarts < 1) throw InvalidArgument("L_max must be at least 1");
}

ComponentSet make_components(const ExperimentConfig& c) {
  validate(c);
  switch (c.component_model) {
    case ComponentModel::orthonormal:
      return orthonormal_components(c.d, c.k, c.seed, c.weights);
    case ComponentModel::gaussian_unit:
      return gaussian_unit_components(c.d, c.k, c.seed, c.weights);
    case ComponentModel::explicit_file:
      if (c.components_file.empty()) {
        throw InvalidArgument("explicit-file model needs components_file");
      }
      return read_component_set(c.components_file);
  }
  throw InvalidArgument("unknown component model");
}

}  // namespace quartic::cli
