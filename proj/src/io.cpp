#include "quartic/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "quartic/errors.hpp"

namespace quartic {

Json to_json(const ComponentSet& components) {
  Json j;
  j["d"] = components.dim();
  j["k"] = components.rank();
  Json weights = Json::array();
  for (std::size_t i = 0; i < components.rank(); ++i) weights.push_back(components.weight(i));
  j["weights"] = std::move(weights);
  Json vectors = Json::array();
  for (std::size_t i = 0; i < components.rank(); ++i) {
    Json row = Json::array();
    const auto u = components.vector(i);
    for (Eigen::Index a = 0; a < u.size(); ++a) row.push_back(u(a));
    vectors.push_back(std::move(row));
  }
  j["vectors"] = std::move(vectors);
  return j;
}

ComponentSet component_set_from_json(const Json& j) {
  try {
    const auto d = j.at("d").get<std::size_t>();
    const auto k = j.at("k").get<std::size_t>();
    const auto& weights = j.at("weights");
    const auto& vectors = j.at("vectors");
    if (weights.size() != k || vectors.size() != k) {
      throw InvalidArgument(fmt::format(
          "component file: k = {} but {} weights and {} vectors", k, weights.size(), vectors.size()));
    }
    Matrix u(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    Vector lambda(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      lambda(static_cast<Eigen::Index>(i)) = weights[i].get<double>();
      if (vectors[i].size() != d) {
        throw InvalidArgument(
            fmt::format("component file: vector {} has length {}, expected {}", i, vectors[i].size(), d));
      }
      for (std::size_t a = 0; a < d; ++a) {
        u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = vectors[i][a].get<double>();
      }
    }
    return ComponentSet(std::move(u), std::move(lambda));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("component file: {}", e.what()));
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(fmt::format("'{}': {}", path.string(), e.what()));
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

ComponentSet read_component_set(const std::filesystem::path& path) {
  return component_set_from_json(read_json_file(path));
}

void write_component_set(const std::filesystem::path& path, const ComponentSet& components) {
  write_text_file(path, dump(to_json(components)));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace quartic
