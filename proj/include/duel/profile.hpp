#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "duel/algorithm_spec.hpp"
#include "duel/bandit.hpp"
#include "duel/prior.hpp"

namespace duel {

struct ExactProfile;

struct RegretProfile {
  std::string algorithm;
  int n_max = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  bool exact = false;
  double benchmark = 0.0;
  double benchmark_se = 0.0;
  std::vector<double> rew_mean, rew_se;
  std::vector<double> bir_mean, bir_se;
  std::vector<double> breg, breg_se;

  double bir_at(int n) const { return bir_mean.at(n - 1); }

  static RegretProfile from_exact(const ExactProfile& p);
  /// Test fixture built from a BIR curve (benchmark 1, rew = 1 - BIR).
  static RegretProfile synthetic(std::vector<double> bir, std::vector<double> se = {});

  void write_csv(std::ostream& os) const;
};

struct ProfileOptions {
  RewardModel reward_model = RewardModel::Bernoulli;
  /// Horizon handed to T-parameterized algorithms; n_max when 0.
  int horizon = 0;
  unsigned workers = 1;
};

/// Replicate r draws mu from derive_seed(seed, "instance", r), so profiles
/// sharing a seed share instances. Per-step regret max(mu) - mu[a_n] is
/// paired within a replicate; the benchmark is the replicates' mean max(mu).
/// Results do not depend on the worker count.
RegretProfile estimate_profile(const AlgorithmSpec& alg, const PriorSpec& prior, int n_max, int replicates,
                               std::uint64_t seed, ProfileOptions opts = {});

/// Steps n where BIR(n+1) > BIR(n) + 3 * combined s.e. + abs_tol.
std::vector<int> audit_monotone(const RegretProfile& p, double abs_tol = 1e-12);

struct RateFit {
  double gamma = 0.0;      // BIR ~ n^-gamma
  double intercept = 0.0;  // log-scale
  double gamma_se = 0.0;
  double ci_low = 0.0;     // 95% interval on gamma
  double ci_high = 0.0;
  int points = 0;
};

/// Least squares of log BIR on log n over [n_min, n_max] (profile end if 0).
RateFit fit_rate(const RegretProfile& p, int n_min, int n_max = 0);

enum class DominanceMode { Strict, Weak };

struct DominanceReport {
  DominanceMode mode = DominanceMode::Strict;
  double eps0 = 0.0;
  double alpha0 = 0.0;
  double beta0 = 0.0;
  std::optional<int> n0;
  /// margin[n-1] = threshold * (BIR2(n) - 2 se) - (BIR1(x) + 2 se); > 0 means the
  /// inequality holds at n.
  std::vector<double> margin;

  nlohmann::json to_json() const;
};

/// Linear interpolation of a per-step curve at real x, clamped to [1, size].
double interpolate(const std::vector<double>& curve, double x);

/// Strict: BIR1(eps0 n / 2) < BIR2(n) / 2. Weak: BIR1((1 - beta0) n) < (1 - alpha0) BIR2(n).
DominanceReport check_bir_dominance(const RegretProfile& p1, const RegretProfile& p2, double eps0,
                                    DominanceMode mode, double alpha0 = 0.0, double beta0 = 0.0);

enum class FloorMode { RandomAssn, SoftmaxAssn };

/// Per-step truth of the regret floor on BIR2 (lower 2-s.e. band).
/// RandomAssn: BIR2(n) > 4 exp(-eps0 n / 12).
/// SoftmaxAssn: BIR2(n) >= (4 / alpha0) exp(-min(eps0, 1/8) n / 12).
std::vector<bool> check_floor(const RegretProfile& p2, double eps0, FloorMode mode, double alpha0 = 1.0);

/// Smallest n such that flags hold on [n, end]; none if the last one fails.
std::optional<int> holds_from(const std::vector<bool>& flags);

/// BReg(n_max) - BReg(n_max / 2) exceeds three combined standard errors.
bool breg_diverging(const RegretProfile& p);

}  // namespace duel
