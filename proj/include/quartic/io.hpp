#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "quartic/tensor.hpp"

namespace quartic {

using Json = nlohmann::ordered_json;

/// {"d", "k", "weights", "vectors"}; one row of "vectors" per component.
Json to_json(const ComponentSet& components);
ComponentSet component_set_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

ComponentSet read_component_set(const std::filesystem::path& path);
void write_component_set(const std::filesystem::path& path, const ComponentSet& components);

/// Pretty-printed with a trailing newline; byte-stable for identical input.
std::string dump(const Json& j);

}  // namespace quartic
