#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "duel/algorithm_spec.hpp"
#include "duel/bandit.hpp"
#include "duel/prior.hpp"
#include "duel/response.hpp"

namespace duel {

/// Agents' distribution of n_1(t), the rounds principal 1 won before t.
struct CountPosterior {
  int t = 1;
  int lo = 0;  // smallest count with positive mass
  std::vector<double> probs;  // probs[k] = Pr[n_1(t) = lo + k]
  double mass() const;
};

struct ScheduleOptions {
  /// Reuse the last tabulated rew value past the end of a profile instead of
  /// failing. Rounds that needed it are flagged.
  bool allow_clamp = false;
  /// Keep every round's count posterior (O(T^2) memory).
  bool keep_posteriors = false;
};

struct GameSchedule {
  int horizon = 0;
  std::vector<double> p;     // p[t-1]
  std::vector<double> pmr1;
  std::vector<double> pmr2;
  /// max |sum N_t - 1| over all rounds.
  double max_mass_error = 0.0;
  bool clamped = false;
  int first_clamped_round = 0;
  std::vector<CountPosterior> posteriors;

  double p_at(int t) const { return p.at(t - 1); }
  void write_csv(std::ostream& os) const;
};

/// p_t from the count-posterior recursion. rew vectors hold rew(1..n).
GameSchedule compute_schedule(const std::vector<double>& rew1, const std::vector<double>& rew2,
                              const ResponseFunction& f, int T, ScheduleOptions opts = {});

/// First round at which one principal's PMR strictly leads, checked to lead
/// through the horizon.
struct SuddenDeath {
  int round = 0;
  int leader = 1;
};

class SuddenDeathViolation : public std::runtime_error {
 public:
  SuddenDeathViolation(int lock_round, int violating_round);
  int lock_round() const { return lock_round_; }
  int violating_round() const { return violating_round_; }

 private:
  int lock_round_;
  int violating_round_;
};

std::optional<SuddenDeath> sudden_death_check(const GameSchedule& schedule);

class UtilityFunction {
 public:
  /// One unit per agent won.
  static UtilityFunction market_share();
  /// U(r) for binary rewards r; requires 0 < U(0) <= U(1).
  static UtilityFunction reward_dependent(double u0, double u1);

  /// Per-round multipliers w_t (t = 1..). Missing rounds weigh 1.
  UtilityFunction with_weights(std::vector<double> weights) const;
  static std::vector<double> discount_weights(double gamma, int T);

  double operator()(double reward) const { return u0_ + (u1_ - u0_) * reward; }
  double weight(int t) const;
  bool is_market_share() const { return market_share_; }
  double u0() const { return u0_; }
  double u1() const { return u1_; }

  nlohmann::json to_json() const;
  static UtilityFunction from_json(const nlohmann::json& doc);

 private:
  bool market_share_ = true;
  double u0_ = 1.0;
  double u1_ = 1.0;
  std::vector<double> weights_;
};

struct GameTrace {
  std::uint64_t seed = 0;
  std::vector<double> mu;
  std::vector<int> choice;       // 1 or 2
  std::vector<int> local_step;   // chosen principal's step index n_i
  std::vector<ArmId> arm;
  std::vector<double> reward;
  std::vector<double> u1;        // running totals
  std::vector<double> u2;
  int n1 = 0;  // rounds won by each principal
  int n2 = 0;

  double utility1() const { return u1.empty() ? 0.0 : u1.back(); }
  double utility2() const { return u2.empty() ? 0.0 : u2.back(); }
  void write_csv(std::ostream& os) const;
};

GameTrace simulate(const AlgorithmSpec& alg1, const AlgorithmSpec& alg2, const PriorSpec& prior,
                   const GameSchedule& schedule, const UtilityFunction& utility, std::uint64_t seed,
                   RewardModel model = RewardModel::Bernoulli);

/// Exact expected utilities (principal 1, principal 2) implied by a schedule.
/// Rewards are binary, so E[U(r)] is affine in PMR.
std::pair<double, double> expected_utility(const GameSchedule& schedule, const UtilityFunction& utility);

struct PayoffCell {
  double u1 = 0.0, u1_se = 0.0;
  double u2 = 0.0, u2_se = 0.0;
  double share1 = 0.0, share1_se = 0.0;
  bool equilibrium = false;
};

struct PayoffMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<PayoffCell>> cells;  // [row = principal 1][col = principal 2]
  std::vector<std::pair<std::size_t, std::size_t>> equilibria;
  bool exact = false;

  nlohmann::json to_json() const;
};

struct PayoffOptions {
  /// 0 means exact: oracle profiles and closed-form expected utilities.
  int replicates = 0;
  /// Profile replicates for the Monte-Carlo path; 0 reuses `replicates`.
  int profile_replicates = 0;
  unsigned workers = 1;
  bool allow_clamp = false;
};

PayoffMatrix payoff_matrix(const std::vector<AlgorithmSpec>& menu, const PriorSpec& prior,
                           const ResponseFunction& f, int T, const UtilityFunction& utility,
                           std::uint64_t seed, PayoffOptions opts = {});

/// Same, with the menu's rew curves already tabulated (exact when
/// opts.replicates == 0).
PayoffMatrix payoff_matrix_from_curves(const std::vector<AlgorithmSpec>& menu,
                                       const std::vector<std::vector<double>>& rew, const PriorSpec& prior,
                                       const ResponseFunction& f, int T, const UtilityFunction& utility,
                                       std::uint64_t seed, PayoffOptions opts = {});

}  // namespace duel
