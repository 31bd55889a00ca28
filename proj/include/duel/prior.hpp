#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"

#include "duel/rng.hpp"

namespace duel {

/// Arms are 0-based in code. Emitted tables label them 1..K.
using ArmId = std::size_t;

using Rational = boost::multiprecision::cpp_rational;

/// Tolerance under which two posterior means count as tied.
inline constexpr double kDegeneracyTolerance = 1e-12;

enum class PriorKind { FiniteSupport, BetaBernoulli };

/// Prior over a single arm's mean reward. Rewards are Bernoulli(mu).
class ArmPrior {
 public:
  static ArmPrior finite(std::vector<double> support, std::vector<double> probs);
  /// Same as finite() but remembers the exact values, so prior-mean
  /// comparisons between exact arms are decided without rounding.
  static ArmPrior finite_exact(std::vector<Rational> support, std::vector<Rational> probs);
  static ArmPrior beta(double alpha, double beta);
  static ArmPrior point(double value) { return finite({value}, {1.0}); }

  PriorKind kind() const { return kind_; }
  bool is_finite() const { return kind_ == PriorKind::FiniteSupport; }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::vector<Rational>& exact_support() const { return exact_support_; }
  const std::vector<Rational>& exact_probs() const { return exact_probs_; }

  double mean() const;
  std::optional<Rational> exact_mean() const;

  /// E[mu | s successes, f failures], evaluated directly from the prior.
  double posterior_mean(int successes, int failures) const;

  /// Pr[mu < x] (finite support only).
  double mass_below(double x) const;

  double sample(Rng& rng) const;

 private:
  ArmPrior() = default;

  PriorKind kind_ = PriorKind::FiniteSupport;
  std::vector<double> support_;
  std::vector<double> probs_;
  std::vector<Rational> exact_support_;
  std::vector<Rational> exact_probs_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

class PosteriorState;

/// Product prior over the mean-reward vector, arms sorted by decreasing
/// prior mean.
class PriorSpec {
 public:
  enum class Check {
    Full,      // distinct sorted prior means, every arm possibly best
    ArmsOnly,  // per-arm validity only; for degenerate diagnostic fixtures
  };

  explicit PriorSpec(std::vector<ArmPrior> arms, Check check = Check::Full);

  std::size_t num_arms() const { return arms_.size(); }
  const ArmPrior& arm(ArmId a) const { return arms_.at(a); }
  const std::vector<ArmPrior>& arms() const { return arms_; }
  bool all_finite() const;

  std::vector<double> sample_instance(Rng& rng) const;

  /// E[max_a mu_a], exact. Finite-support priors only.
  double expected_max() const;

  /// Pr[arm a is strictly best], exact. Finite-support arms only.
  double prob_best(ArmId a) const;

  PosteriorState initial_posterior() const;

  nlohmann::json to_json() const;
  static PriorSpec from_json(const nlohmann::json& doc, Check check = Check::Full);

 private:
  void validate_full() const;

  std::vector<ArmPrior> arms_;
};

/// Per-arm sufficient statistics of the posterior given observed 0-1 rewards.
class PosteriorState {
 public:
  explicit PosteriorState(const PriorSpec& spec);

  std::size_t num_arms() const { return arms_.size(); }

  /// Bayes update with a binary reward. Throws on non-binary rewards.
  void update(ArmId arm, double reward);

  double mean(ArmId arm) const { return arms_.at(arm).mean; }

  /// Lowest-index arm with the highest posterior mean.
  ArmId argmax_mean() const;

  const std::vector<double>& probs(ArmId arm) const { return arms_.at(arm).probs; }
  double alpha(ArmId arm) const { return arms_.at(arm).alpha; }
  double beta(ArmId arm) const { return arms_.at(arm).beta; }
  int successes(ArmId arm) const { return arms_.at(arm).successes; }
  int failures(ArmId arm) const { return arms_.at(arm).failures; }

 private:
  struct Arm {
    PriorKind kind;
    std::vector<double> support;
    std::vector<double> probs;
    double alpha = 0.0;
    double beta = 0.0;
    int successes = 0;
    int failures = 0;
    double mean = 0.0;
  };

  std::vector<Arm> arms_;
};

PosteriorState update_posterior(PosteriorState state, ArmId arm, double reward);
double posterior_mean(const PosteriorState& state, ArmId arm);

std::vector<double> sample_instance(const PriorSpec& spec, std::uint64_t seed);

/// Uniform draw from {q : sum(q) = 0, |q|_2 <= radius} in dimension d.
std::vector<double> sample_zero_sum_ball(std::size_t d, double radius, Rng& rng);

struct PerturbedPrior {
  PriorSpec spec;
  /// Accepted noise vector per arm, before any validity repair.
  std::vector<std::vector<double>> noise;
  /// Number of rejected draws across all arms.
  std::size_t rejections = 0;
};

/// Adds independent zero-sum ball noise to every arm's probability vector.
/// Draws leaving a probability outside [1e-9, 1] or breaking the PriorSpec
/// invariants are rejected and redrawn.
PerturbedPrior perturb_prior(const PriorSpec& spec, double epsilon, std::uint64_t seed);

struct DegeneracyReport {
  bool nondegenerate = true;
  /// Offending history as (arm, reward) pairs; empty when nondegenerate or
  /// when the tie is already present in the prior.
  std::vector<std::pair<ArmId, int>> witness;
  ArmId arm_a = 0;
  ArmId arm_b = 0;
};

inline constexpr int kMaxDegeneracyHorizon = 14;

/// Checks pairwise-distinct posterior means over every history of length
/// <= horizon, shortest histories first.
DegeneracyReport is_nondegenerate(const PriorSpec& spec, int horizon);

}  // namespace duel
