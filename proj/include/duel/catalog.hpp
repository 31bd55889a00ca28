#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duel/scenario.hpp"

namespace duel {

/// Prior used by the small exact fixtures: arm 1 uniform on {0.1, 0.9},
/// arm 2 a point mass at 0.4.
nlohmann::json oracle_instance_json();
PriorSpec oracle_instance();

const std::vector<Scenario>& builtin_scenarios();
std::optional<Scenario> find_builtin(const std::string& name);

}  // namespace duel
