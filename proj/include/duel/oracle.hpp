#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "duel/algorithm_spec.hpp"
#include "duel/game.hpp"
#include "duel/prior.hpp"
#include "duel/response.hpp"

namespace duel {

/// Size limit on |support|^K * 2^n_max, and on live enumeration states.
inline constexpr double kOracleBudget = 1e7;
inline constexpr int kOracleMaxGameHorizon = 14;

struct ExactProfile {
  std::string algorithm;
  int n_max = 0;
  double benchmark = 0.0;         // E[max_a mu_a]
  std::vector<double> rew;        // rew[n-1]
  std::vector<double> bir;
  /// Expected reward of the greedy choice after n-1 steps of the algorithm.
  std::vector<double> greedy_rew;
  std::size_t peak_states = 0;

  double rew_at(int n) const { return rew.at(n - 1); }
  double bir_at(int n) const { return bir.at(n - 1); }
  void write_csv(std::ostream& os) const;
};

/// Exact rew(n), n = 1..n_max, by enumerating every reward sequence and every
/// internal coin of the algorithm. Histories reaching identical states are
/// merged. T-parameterized algorithms use `horizon` (n_max if 0).
ExactProfile exact_rew(const AlgorithmSpec& alg, const PriorSpec& prior, int n_max, int horizon = 0);

/// rew(n) of MixedGreedy(base, p, n0) assembled from the base's exact
/// profile: the step-n reward mixes the base step and the greedy step after
/// m base steps, with m = min(n, n0) - 1 + Binomial(max(0, n - n0), 1 - p).
std::vector<double> mixed_greedy_rew(const ExactProfile& base, double p, int n0, int n_max);

struct ExactGame {
  ExactProfile profile1;
  ExactProfile profile2;
  GameSchedule schedule;
};

ExactGame exact_game(const AlgorithmSpec& alg1, const AlgorithmSpec& alg2, const PriorSpec& prior,
                     const ResponseFunction& f, int T);

}  // namespace duel
