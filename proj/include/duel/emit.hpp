#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "duel/scenario.hpp"

namespace duel {

enum class EmitFormat { Csv, Json };

EmitFormat parse_format(const std::string& s);

/// Writes the bundle under `dir`, creating it if needed. Returns the files
/// written, in order. Identical bundles give identical bytes.
std::vector<std::filesystem::path> emit(const ResultBundle& bundle, EmitFormat format,
                                        const std::filesystem::path& dir);

/// Flattens nested JSON into "a.b.0" style keys, in key order.
void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out);

}  // namespace duel
