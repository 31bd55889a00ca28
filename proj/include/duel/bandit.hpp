#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "duel/prior.hpp"
#include "duel/rng.hpp"

namespace duel {

/// How a realized reward relates to the arm mean.
enum class RewardModel {
  Bernoulli,      // r ~ Bernoulli(mu_a)
  Deterministic,  // r = mu_a, test-only
};

struct HistoryStep {
  int n = 0;  // 1-based local step
  ArmId arm = 0;
  double reward = 0.0;
};

class AlgorithmHistory {
 public:
  explicit AlgorithmHistory(std::size_t num_arms = 0)
      : pulls_(num_arms, 0), reward_sum_(num_arms, 0.0) {}

  void record(ArmId arm, double reward, bool keep_steps);
  void clear();

  int length() const { return length_; }
  const std::vector<HistoryStep>& steps() const { return steps_; }
  int pulls(ArmId a) const { return pulls_.at(a); }
  double reward_sum(ArmId a) const { return reward_sum_.at(a); }

 private:
  int length_ = 0;
  std::vector<HistoryStep> steps_;
  std::vector<int> pulls_;
  std::vector<double> reward_sum_;
};

/// One possible outcome of an algorithm's internal randomization at the
/// current step. The tag identifies the outcome to take(); probabilities of
/// all branches at a step sum to 1.
struct Branch {
  ArmId arm = 0;
  double prob = 1.0;
  std::uint64_t tag = 0;
};

class BanditAlgorithm {
 public:
  BanditAlgorithm(std::size_t num_arms, std::uint64_t seed);
  virtual ~BanditAlgorithm() = default;

  /// Samples the next recommendation from the algorithm's own stream.
  ArmId next_arm();

  /// Must follow each next_arm()/take() exactly once, with the same arm.
  void observe(ArmId arm, double reward);

  /// Back to the freshly constructed state, including the RNG.
  void reset();

  /// Exact enumeration hooks: list the current step's outcomes, then commit
  /// to one of them. next_arm() is branches() + a draw + take().
  virtual void branches(std::vector<Branch>& out) const = 0;
  void take(const Branch& b);

  virtual std::unique_ptr<BanditAlgorithm> clone() const = 0;

  /// Appends a key that equals another instance's key iff their future
  /// behaviour is identical. Only meaningful between observe() calls.
  virtual void state_key(std::vector<std::int64_t>& key) const = 0;

  virtual std::string name() const = 0;
  virtual bool is_anytime() const = 0;
  virtual nlohmann::json parameters() const { return nlohmann::json::object(); }

  std::size_t num_arms() const { return num_arms_; }
  const AlgorithmHistory& history() const { return history_; }
  int steps_done() const { return history_.length(); }

  /// Per-step history recording costs memory on long runs; counts are
  /// kept either way.
  void set_record_steps(bool on) { record_steps_ = on; }

 protected:
  virtual void do_take(const Branch& b) = 0;
  virtual void do_observe(ArmId arm, double reward) = 0;
  virtual void do_reset() = 0;

 private:
  std::size_t num_arms_;
  std::uint64_t seed_;
  Rng rng_;
  AlgorithmHistory history_;
  bool record_steps_ = true;
  bool pending_ = false;
  ArmId pending_arm_ = 0;
  std::vector<Branch> scratch_;
};

class DynamicGreedy : public BanditAlgorithm {
 public:
  DynamicGreedy(const PriorSpec& prior, std::uint64_t seed = 0);

  void branches(std::vector<Branch>& out) const override;
  std::unique_ptr<BanditAlgorithm> clone() const override;
  void state_key(std::vector<std::int64_t>& key) const override;
  std::string name() const override { return "DynamicGreedy"; }
  bool is_anytime() const override { return true; }

  const PosteriorState& posterior() const { return posterior_; }

 protected:
  void do_take(const Branch&) override {}
  void do_observe(ArmId arm, double reward) override { posterior_.update(arm, reward); }
  void do_reset() override { posterior_ = initial_; }

 private:
  PosteriorState initial_;
  PosteriorState posterior_;
};

class StaticGreedy : public BanditAlgorithm {
 public:
  explicit StaticGreedy(std::size_t num_arms, std::uint64_t seed = 0) : BanditAlgorithm(num_arms, seed) {}

  void branches(std::vector<Branch>& out) const override;
  std::unique_ptr<BanditAlgorithm> clone() const override;
  void state_key(std::vector<std::int64_t>&) const override {}
  std::string name() const override { return "StaticGreedy"; }
  bool is_anytime() const override { return true; }

 protected:
  void do_take(const Branch&) override {}
  void do_observe(ArmId, double) override {}
  void do_reset() override {}
};

class ExploreThenExploit : public BanditAlgorithm {
 public:
  ExploreThenExploit(std::size_t num_arms, int m, int horizon, std::uint64_t seed = 0);

  void branches(std::vector<Branch>& out) const override;
  std::unique_ptr<BanditAlgorithm> clone() const override;
  void state_key(std::vector<std::int64_t>& key) const override;
  std::string name() const override { return "ExploreThenExploit"; }
  bool is_anytime() const override { return false; }
  nlohmann::json parameters() const override { return {{"m", m_}, {"T", horizon_}}; }

  int m() const { return m_; }
  /// Valid once the exploration block is over.
  ArmId exploit_arm() const { return exploit_; }
  bool exploring() const { return left_total_ > 0; }

 protected:
  void do_take(const Branch&) override {}
  void do_observe(ArmId arm, double reward) override;
  void do_reset() override;

 private:
  int m_;
  int horizon_;
  std::vector<int> left_;
  int left_total_ = 0;
  std::vector<double> sums_;
  ArmId exploit_ = 0;
};

/// Phase lengths m_t for t = 1, 2, ...
using PhaseSchedule = std::function<long long(long long)>;

PhaseSchedule named_schedule(const std::string& name, std::size_t num_arms);

class PhasedExploreExploit : public BanditAlgorithm {
 public:
  /// Checks m_t >= K and m_t non-decreasing for every phase starting
  /// within the first `horizon` steps.
  PhasedExploreExploit(std::size_t num_arms, PhaseSchedule schedule, std::string schedule_name,
                       int horizon, std::uint64_t seed = 0);

  void branches(std::vector<Branch>& out) const override;
  std::unique_ptr<BanditAlgorithm> clone() const override;
  void state_key(std::vector<std::int64_t>& key) const override;
  std::string name() const override { return "PhasedEE"; }
  bool is_anytime() const override { return true; }
  nlohmann::json parameters() const override { return {{"schedule", schedule_name_}}; }

  long long phase() const { return phase_; }
  ArmId exploit_arm() const { return exploit_; }

 protected:
  void do_take(const Branch& b) override;
  void do_observe(ArmId arm, double reward) override;
  void do_reset() override;

 private:
  void start_phase(long long t);

  PhaseSchedule schedule_;
  std::string schedule_name_;
  long long phase_ = 0;
  long long phase_len_ = 0;
  long long pos_ = 0;  // slots used in the current phase
  std::vector<bool> explored_;
  int unexplored_ = 0;
  std::vector<double> sums_;
  std::vector<int> counts_;
  ArmId exploit_ = 0;
  bool explore_step_ = false;
};

class SuccessiveEliminationReset : public BanditAlgorithm {
 public:
  SuccessiveEliminationReset(std::size_t num_arms, int horizon, double delta, std::uint64_t seed = 0);

  void branches(std::vector<Branch>& out) const override;
  std::unique_ptr<BanditAlgorithm> clone() const override;
  void state_key(std::vector<std::int64_t>& key) const override;
  std::string name() const override { return "SuccElimReset"; }
  bool is_anytime() const override { return false; }
  nlohmann::json parameters() const override { return {{"T", horizon_}, {"delta", delta_}}; }

  const std::vector<ArmId>& survivors() const { return survivors_; }
  /// Completed phases since the last reset.
  int phase() const { return phase_; }
  /// Phase count at which the most recent elimination happened, 0 if none.
  int last_elimination_phase() const { return last_elim_phase_; }
  int pulls_since_reset(ArmId a) const { return counts_.at(a); }

 protected:
  void do_take(const Branch&) override {}
  void do_observe(ArmId arm, double reward) override;
  void do_reset() override;

 private:
  int horizon_;
  double delta_;
  double width_;
  std::vector<ArmId> survivors_;
  std::vector<bool> pending_in_phase_;
  int pending_count_ = 0;
  std::vector<double> sums_;
  std::vector<int> counts_;
  int phase_ = 0;
  int last_elim_phase_ = 0;
};

/// Runs `base`, except that from local step n0 on, each step is replaced with
/// probability p by the greedy choice given base's own history. Rewards from
/// greedy steps are not fed back to base.
class MixedGreedy : public BanditAlgorithm {
 public:
  MixedGreedy(std::unique_ptr<BanditAlgorithm> base, const PriorSpec& prior, double p, int n0,
              std::uint64_t seed = 0);
  MixedGreedy(const MixedGreedy& other);

  void branches(std::vector<Branch>& out) const override;
  std::unique_ptr<BanditAlgorithm> clone() const override;
  void state_key(std::vector<std::int64_t>& key) const override;
  std::string name() const override { return "MixedGreedy"; }
  bool is_anytime() const override { return base_->is_anytime(); }
  nlohmann::json parameters() const override;

  const BanditAlgorithm& base() const { return *base_; }
  double p() const { return p_; }
  int n0() const { return n0_; }
  bool last_step_greedy() const { return greedy_step_; }

 protected:
  void do_take(const Branch& b) override;
  void do_observe(ArmId arm, double reward) override;
  void do_reset() override;

 private:
  std::unique_ptr<BanditAlgorithm> base_;
  PosteriorState initial_;
  PosteriorState posterior_;
  double p_;
  int n0_;
  bool greedy_step_ = false;
};

}  // namespace duel
