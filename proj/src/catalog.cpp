#include "duel/catalog.hpp"

namespace duel {

namespace {

const char* kOracle = R"({"arms": [
  {"kind": "finite", "support": ["1/10", "9/10"], "probs": ["1/2", "1/2"]},
  {"kind": "finite", "support": ["2/5"], "probs": ["1"]}]})";

// Beta(1,1) x Beta(1,1) has tied prior means; the first arm is nudged.
const char* kFlat = R"({"arms": [
  {"kind": "beta", "alpha": 1.001, "beta": 1},
  {"kind": "beta", "alpha": 1, "beta": 1}]})";

nlohmann::json with_prior(const char* text, const char* prior) {
  auto j = nlohmann::json::parse(text);
  j["prior"] = nlohmann::json::parse(prior);
  j["seed"] = kDefaultSeed;
  return j;
}

std::vector<Scenario> build() {
  const std::vector<std::pair<const char*, const char*>> docs = {
      {R"({"name": "dg-dominance",
        "description": "HardMax with fair ties: DynamicGreedy against StaticGreedy takes every agent from round 2",
        "algorithms": [{"name": "DynamicGreedy"}, {"name": "StaticGreedy"}],
        "response": {"regime": "hardmax", "tie": 0.5}, "T": 12,
        "checks": [
          {"type": "p_equals", "name": "first round is a fair tie", "from": 1, "to": 1, "value": 0.5},
          {"type": "sudden_death", "leader": 1, "max_round": 2},
          {"type": "p_equals", "name": "principal 1 wins every later agent", "from": 2, "value": 1}]})",
       kOracle},
      {R"({"name": "static-greedy-ties",
        "description": "HardMax with ties to principal 1: StaticGreedy keeps every agent",
        "algorithms": [{"name": "StaticGreedy"}, {"name": "DynamicGreedy"}],
        "response": {"regime": "hardmax", "tie": 1.0}, "T": 12,
        "checks": [{"type": "p_equals", "name": "p_t = 1 for all t", "from": 1, "value": 1}]})",
       kOracle},
      {R"({"name": "biased-ties",
        "description": "HardMax with ties biased to principal 1, same algorithm on both sides",
        "algorithms": [{"name": "DynamicGreedy"}, {"name": "DynamicGreedy"}],
        "response": {"regime": "hardmax", "tie": 0.6}, "T": 12,
        "checks": [
          {"type": "p_equals", "name": "tie at round 1", "from": 1, "to": 1, "value": 0.6},
          {"type": "sudden_death", "leader": 1, "max_round": 2},
          {"type": "p_equals", "name": "principal 1 wins from round 2", "from": 2, "value": 1}]})",
       kOracle},
      {R"({"name": "hmr-ceiling",
        "description": "HardMax&Random: a strictly BIR-dominating algorithm is chosen with probability 1 - eps0",
        "algorithms": [{"name": "SuccElimReset", "delta": 0.1}, {"name": "DynamicGreedy"}],
        "response": {"regime": "hardmax_random", "eps0": 0.2}, "T": 5000, "replicates": 100000,
        "checks": [
          {"type": "dominance", "mode": "strict", "mark": "n0_dom"},
          {"type": "floor", "mode": "random", "mark": "n0_floor"},
          {"type": "p_equals", "name": "p_t = 1 - eps0 beyond n0", "from": ["n0_dom", "n0_floor"], "value": "high"}]})",
       kFlat},
      {R"({"name": "greedy-spoiler",
        "description": "HardMax&Random: mixing greedy steps into the rival's algorithm wins 1 - eps0 of the agents",
        "algorithms": [{"name": "ExploreThenExploit", "m": 1},
                       {"name": "MixedGreedy", "base": {"name": "ExploreThenExploit", "m": 1}, "p": 0.3, "n0": 1}],
        "response": {"regime": "hardmax_random", "eps0": 0.1}, "T": 12,
        "checks": [
          {"type": "mixed_formula", "principal": 2},
          {"type": "sudden_death", "leader": 2},
          {"type": "p_equals", "name": "mixed principal gets 1 - eps0", "principal": 2, "from": "lock", "value": 0.9}]})",
       kOracle},
      {R"({"name": "softmax-bump",
        "description": "SoftMax: strict BIR-dominance plus the regret floor gives a bump of c0 / 4 times BIR2",
        "algorithms": [{"name": "DynamicGreedy"}, {"name": "StaticGreedy"}],
        "response": {"regime": "softmax", "eps0": 0.1, "slope": 4}, "T": 5000, "replicates": 20000,
        "checks": [
          {"type": "dominance", "mode": "strict", "mark": "n0_dom"},
          {"type": "floor", "mode": "random", "mark": "n0_floor"},
          {"type": "softmax_bump", "alpha0": 1.0, "max_t0": ["n0_dom", "n0_floor"]}]})",
       kFlat},
      {R"({"name": "softmax-strong",
        "description": "SoftMax: weak BIR-dominance plus the stronger floor gives a bump of c0 alpha0 / 4 times BIR2",
        "algorithms": [{"name": "SuccElimReset", "delta": 0.1}, {"name": "StaticGreedy"}],
        "response": {"regime": "softmax", "eps0": 0.1, "slope": 4}, "T": 5000, "replicates": 20000,
        "checks": [
          {"type": "dominance", "mode": "weak", "alpha0": 0.25, "beta0": 0.25, "mark": "n0_dom"},
          {"type": "floor", "mode": "softmax", "alpha0": 0.25, "mark": "n0_floor"},
          {"type": "breg_diverging", "principal": 2},
          {"type": "softmax_bump", "alpha0": 0.25, "mark": "t0"}]})",
       kFlat},
      {R"({"name": "restricted-equilibrium",
        "description": "Restricted game under HardMax with fair ties: DynamicGreedy against itself is the only pure equilibrium",
        "kind": "matrix",
        "algorithms": [{"name": "DynamicGreedy"}, {"name": "StaticGreedy"}, {"name": "ExploreThenExploit", "m": 1}],
        "response": {"regime": "hardmax", "tie": 0.5}, "T": 12,
        "checks": [{"type": "equilibrium", "cells": [[0, 0]]}]})",
       kOracle},
      {R"({"name": "inverted-u-main",
        "description": "Equilibrium verdict for the better algorithm across response regimes",
        "kind": "regime-sweep",
        "algorithms": [{"name": "ExploreThenExploit", "m": 20}, {"name": "DynamicGreedy"}],
        "response": {"regime": "uniform"}, "T": 2000, "replicates": 20000, "traces": 1000,
        "points": [{"regime": "uniform"}, {"regime": "softmax", "eps0": 0.1, "slope": 4},
                   {"regime": "hardmax_random", "eps0": 0.2}, {"regime": "hardmax", "tie": 0.5}],
        "checks": [
          {"type": "regime_verdict", "regime": "softmax", "better_is_equilibrium": true},
          {"type": "regime_verdict", "regime": "hardmax_random", "better_is_equilibrium": true},
          {"type": "regime_verdict", "regime": "hardmax", "better_is_equilibrium": false}]})",
       kFlat},
      {R"({"name": "inverted-u-secondary",
        "description": "Marginal market share from switching DynamicGreedy to a better algorithm, across eps0",
        "kind": "eps0-sweep",
        "algorithms": [{"name": "ExploreThenExploit", "m": 20}, {"name": "DynamicGreedy"}],
        "response": {"regime": "hardmax_random", "eps0": 0.2}, "T": 2000, "replicates": 20000, "traces": 2000,
        "points": [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.49],
        "checks": [{"type": "inverted_u", "near_zero_at": 0.49, "nonpositive_at": 0.01}]})",
       kFlat},
      {R"({"name": "uniform-baseline",
        "description": "Uniform response: agents ignore the principals, shares are one half",
        "algorithms": [{"name": "DynamicGreedy"}, {"name": "StaticGreedy"}],
        "response": {"regime": "uniform"}, "T": 12, "traces": 4000,
        "checks": [
          {"type": "p_equals", "from": 1, "value": 0.5},
          {"type": "market_share", "value": 0.5, "sigmas": 3}]})",
       kOracle},
  };
  std::vector<Scenario> out;
  for (const auto& [text, prior] : docs) out.push_back(Scenario::from_json(with_prior(text, prior)));
  return out;
}

}  // namespace

nlohmann::json oracle_instance_json() { return nlohmann::json::parse(kOracle); }

PriorSpec oracle_instance() { return PriorSpec::from_json(oracle_instance_json()); }

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = build();
  return all;
}

std::optional<Scenario> find_builtin(const std::string& name) {
  for (const auto& s : builtin_scenarios())
    if (s.name == name) return s;
  return std::nullopt;
}

}  // namespace duel
