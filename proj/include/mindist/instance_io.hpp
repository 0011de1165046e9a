#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mindist/problem.hpp"

namespace mindist {

/// Parses the instance document
///   {"n": int, "A": [[...], ...], "r": num, "alpha": num, "eta": num,
///    "f": [...], "c": [...]}
/// Unknown or missing fields, malformed JSON and invalid data all throw
/// InputError; syntax errors carry the line and column.
ProblemInstance parse_instance(std::string_view text);
ProblemInstance load_instance(const std::filesystem::path& path);

nlohmann::json instance_to_json(const ProblemInstance& inst);

}  // namespace mindist
