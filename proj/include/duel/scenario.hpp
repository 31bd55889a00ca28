#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "duel/algorithm_spec.hpp"
#include "duel/game.hpp"
#include "duel/prior.hpp"
#include "duel/profile.hpp"
#include "duel/response.hpp"

namespace duel {

inline constexpr const char* kVersion = "0.4.0";
inline constexpr std::uint64_t kDefaultSeed = 20240611;

enum class ScenarioKind { Game, Matrix, RegimeSweep, Eps0Sweep };

std::string kind_name(ScenarioKind k);

struct Scenario {
  std::string name;
  std::string description;
  ScenarioKind kind = ScenarioKind::Game;
  PriorSpec prior{{ArmPrior::point(0.5)}};
  /// Game: principal 1 and 2. Matrix: the menu. Sweeps: {better, base}.
  std::vector<AlgorithmSpec> algorithms;
  ResponseFunction response = ResponseFunction::uniform();
  int T = 10;
  UtilityFunction utility = UtilityFunction::market_share();
  /// Profile replicates; 0 selects the exact oracle.
  int replicates = 0;
  /// Sampled game traces (Game) or payoff replicates (Matrix, sweeps).
  int traces = 0;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;
  bool allow_clamp = false;
  /// Sweep points: eps0 values, or response documents for a regime sweep.
  nlohmann::json points = nlohmann::json::array();
  /// Machine-checkable expectations, evaluated in order.
  nlohmann::json checks = nlohmann::json::array();

  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& doc);

  /// FNV-1a over the canonical (sorted, compact) JSON, excluding workers.
  std::string config_hash() const;
};

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ResultBundle {
  std::string scenario;
  std::string description;
  std::string kind;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string config_hash;
  nlohmann::json config;
  std::optional<GameSchedule> schedule;
  std::vector<RegretProfile> profiles;
  /// Everything else: trace statistics, matrix, sweep table, dominance
  /// reports. Numbers carry an "_se" sibling or live under "exact": true.
  nlohmann::json summary = nlohmann::json::object();
  std::vector<AssertionResult> assertions;

  bool all_passed() const;
  nlohmann::json to_json() const;
  static ResultBundle from_json(const nlohmann::json& doc);
};

ResultBundle run_scenario(const Scenario& s);

enum class SweepAxis { Regime, Eps0 };

/// Sweep rows; each row is a JSON object. Eps0 rows carry the marginal
/// utility of principal 1 switching from base to better, with its s.e.
nlohmann::json run_inverted_u(const Scenario& base, SweepAxis axis, const nlohmann::json& points);

}  // namespace duel
