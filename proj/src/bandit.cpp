#include "duel/bandit.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace duel {

namespace {

std::int64_t bits(double x) { return std::bit_cast<std::int64_t>(x); }

ArmId argmax_average(const std::vector<double>& sums, const std::vector<int>& counts) {
  ArmId best = 0;
  double best_avg = counts[0] > 0 ? sums[0] / counts[0] : 0.0;
  for (ArmId a = 1; a < sums.size(); ++a) {
    const double avg = counts[a] > 0 ? sums[a] / counts[a] : 0.0;
    if (avg > best_avg) {
      best = a;
      best_avg = avg;
    }
  }
  return best;
}

}  // namespace

void AlgorithmHistory::record(ArmId arm, double reward, bool keep_steps) {
  ++length_;
  ++pulls_.at(arm);
  reward_sum_[arm] += reward;
  if (keep_steps) steps_.push_back({length_, arm, reward});
}

void AlgorithmHistory::clear() {
  length_ = 0;
  steps_.clear();
  std::fill(pulls_.begin(), pulls_.end(), 0);
  std::fill(reward_sum_.begin(), reward_sum_.end(), 0.0);
}

// ------------------------------------------------------------------ base

BanditAlgorithm::BanditAlgorithm(std::size_t num_arms, std::uint64_t seed)
    : num_arms_(num_arms), seed_(seed), rng_(seed), history_(num_arms) {
  if (num_arms == 0) throw std::invalid_argument("bandit: at least one arm required");
}

ArmId BanditAlgorithm::next_arm() {
  if (pending_) throw std::logic_error("next_arm called twice without observe");
  scratch_.clear();
  branches(scratch_);
  std::size_t pick = 0;
  if (scratch_.size() > 1) {
    const double u = rng_.uniform();
    double acc = 0.0;
    pick = scratch_.size() - 1;
    for (std::size_t i = 0; i < scratch_.size(); ++i) {
      acc += scratch_[i].prob;
      if (u < acc) {
        pick = i;
        break;
      }
    }
  }
  const Branch chosen = scratch_[pick];
  take(chosen);
  return chosen.arm;
}

void BanditAlgorithm::take(const Branch& b) {
  if (pending_) throw std::logic_error("step taken twice without observe");
  if (b.arm >= num_arms_) throw std::out_of_range("bandit: arm out of range");
  do_take(b);
  pending_ = true;
  pending_arm_ = b.arm;
}

void BanditAlgorithm::observe(ArmId arm, double reward) {
  if (!pending_) throw std::logic_error("observe called without a pending recommendation");
  if (arm != pending_arm_) throw std::logic_error("observe: arm differs from the recommended arm");
  pending_ = false;
  history_.record(arm, reward, record_steps_);
  do_observe(arm, reward);
}

void BanditAlgorithm::reset() {
  rng_.reseed(seed_);
  history_.clear();
  pending_ = false;
  do_reset();
}

// ---------------------------------------------------------- DynamicGreedy

DynamicGreedy::DynamicGreedy(const PriorSpec& prior, std::uint64_t seed)
    : BanditAlgorithm(prior.num_arms(), seed), initial_(prior), posterior_(prior) {}

void DynamicGreedy::branches(std::vector<Branch>& out) const {
  out.push_back({posterior_.argmax_mean(), 1.0, 0});
}

std::unique_ptr<BanditAlgorithm> DynamicGreedy::clone() const {
  return std::make_unique<DynamicGreedy>(*this);
}

void DynamicGreedy::state_key(std::vector<std::int64_t>& key) const {
  for (ArmId a = 0; a < num_arms(); ++a) {
    key.push_back(posterior_.successes(a));
    key.push_back(posterior_.failures(a));
  }
}

// ----------------------------------------------------------- StaticGreedy

void StaticGreedy::branches(std::vector<Branch>& out) const { out.push_back({0, 1.0, 0}); }

std::unique_ptr<BanditAlgorithm> StaticGreedy::clone() const {
  return std::make_unique<StaticGreedy>(*this);
}

// ----------------------------------------------------- ExploreThenExploit

ExploreThenExploit::ExploreThenExploit(std::size_t num_arms, int m, int horizon, std::uint64_t seed)
    : BanditAlgorithm(num_arms, seed), m_(m), horizon_(horizon) {
  if (m < 1) throw std::invalid_argument("ExploreThenExploit: m must be at least 1");
  if (static_cast<long long>(m) * static_cast<long long>(num_arms) > horizon)
    throw std::invalid_argument("ExploreThenExploit: m*K exceeds the horizon");
  do_reset();
}

void ExploreThenExploit::do_reset() {
  left_.assign(num_arms(), m_);
  left_total_ = m_ * static_cast<int>(num_arms());
  sums_.assign(num_arms(), 0.0);
  exploit_ = 0;
}

void ExploreThenExploit::branches(std::vector<Branch>& out) const {
  if (left_total_ == 0) {
    out.push_back({exploit_, 1.0, 0});
    return;
  }
  for (ArmId a = 0; a < num_arms(); ++a)
    if (left_[a] > 0) out.push_back({a, static_cast<double>(left_[a]) / left_total_, a});
}

void ExploreThenExploit::do_observe(ArmId arm, double reward) {
  if (left_total_ == 0) return;
  --left_[arm];
  --left_total_;
  sums_[arm] += reward;
  if (left_total_ == 0) {
    // Every arm has exactly m samples, so sums order like averages.
    exploit_ = 0;
    for (ArmId a = 1; a < num_arms(); ++a)
      if (sums_[a] > sums_[exploit_]) exploit_ = a;
  }
}

std::unique_ptr<BanditAlgorithm> ExploreThenExploit::clone() const {
  return std::make_unique<ExploreThenExploit>(*this);
}

void ExploreThenExploit::state_key(std::vector<std::int64_t>& key) const {
  for (ArmId a = 0; a < num_arms(); ++a) {
    key.push_back(left_[a]);
    key.push_back(bits(sums_[a]));
  }
  key.push_back(static_cast<std::int64_t>(exploit_));
}

// --------------------------------------------------- PhasedExploreExploit

PhaseSchedule named_schedule(const std::string& name, std::size_t num_arms) {
  const auto k = static_cast<long long>(num_arms);
  if (name == "sqrt") {
    return [k](long long t) {
      auto r = static_cast<long long>(std::sqrt(static_cast<double>(t)));
      while (r * r < t) ++r;
      while (r > 0 && (r - 1) * (r - 1) >= t) --r;
      return std::max(k, r);
    };
  }
  if (name == "doubling") {
    return [k](long long t) { return std::max(k, 1LL << std::min(t, 62LL)); };
  }
  throw std::invalid_argument("PhasedEE: unknown schedule '" + name + "'");
}

PhasedExploreExploit::PhasedExploreExploit(std::size_t num_arms, PhaseSchedule schedule,
                                           std::string schedule_name, int horizon,
                                           std::uint64_t seed)
    : BanditAlgorithm(num_arms, seed),
      schedule_(std::move(schedule)),
      schedule_name_(std::move(schedule_name)) {
  long long start = 0;
  long long prev = 0;
  for (long long t = 1; start < horizon; ++t) {
    const long long m = schedule_(t);
    if (m < static_cast<long long>(num_arms))
      throw std::invalid_argument("PhasedEE: phase " + std::to_string(t) + " has length " +
                                  std::to_string(m) + " < K");
    if (m < prev) throw std::invalid_argument("PhasedEE: phase lengths must be non-decreasing");
    prev = m;
    start += m;
  }
  do_reset();
}

void PhasedExploreExploit::do_reset() {
  sums_.assign(num_arms(), 0.0);
  counts_.assign(num_arms(), 0);
  explore_step_ = false;
  start_phase(1);
}

void PhasedExploreExploit::start_phase(long long t) {
  phase_ = t;
  phase_len_ = schedule_(t);
  pos_ = 0;
  explored_.assign(num_arms(), false);
  unexplored_ = static_cast<int>(num_arms());
  exploit_ = argmax_average(sums_, counts_);
}

void PhasedExploreExploit::branches(std::vector<Branch>& out) const {
  // Explore positions form a uniform K-subset of the phase, visited in a
  // uniform arm order: sample sequentially.
  const double left = static_cast<double>(phase_len_ - pos_);
  for (ArmId a = 0; a < num_arms(); ++a)
    if (!explored_[a]) out.push_back({a, 1.0 / left, a + 1});
  if (phase_len_ - pos_ > unexplored_) out.push_back({exploit_, (left - unexplored_) / left, 0});
}

void PhasedExploreExploit::do_take(const Branch& b) {
  explore_step_ = b.tag != 0;
  if (explore_step_) {
    explored_[b.tag - 1] = true;
    --unexplored_;
  }
}

void PhasedExploreExploit::do_observe(ArmId arm, double reward) {
  if (explore_step_) {
    sums_[arm] += reward;
    ++counts_[arm];
  }
  if (++pos_ == phase_len_) start_phase(phase_ + 1);
}

std::unique_ptr<BanditAlgorithm> PhasedExploreExploit::clone() const {
  return std::make_unique<PhasedExploreExploit>(*this);
}

void PhasedExploreExploit::state_key(std::vector<std::int64_t>& key) const {
  key.push_back(phase_);
  key.push_back(pos_);
  for (ArmId a = 0; a < num_arms(); ++a) {
    key.push_back(explored_[a]);
    key.push_back(counts_[a]);
    key.push_back(bits(sums_[a]));
  }
}

// ---------------------------------------------- SuccessiveEliminationReset

SuccessiveEliminationReset::SuccessiveEliminationReset(std::size_t num_arms, int horizon,
                                                       double delta, std::uint64_t seed)
    : BanditAlgorithm(num_arms, seed), horizon_(horizon), delta_(delta) {
  if (horizon < 1) throw std::invalid_argument("SuccElimReset: horizon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("SuccElimReset: delta must lie in (0,1)");
  width_ = std::log(horizon / delta);
  do_reset();
}

void SuccessiveEliminationReset::do_reset() {
  survivors_.clear();
  for (ArmId a = 0; a < num_arms(); ++a) survivors_.push_back(a);
  pending_in_phase_.assign(num_arms(), true);
  pending_count_ = static_cast<int>(num_arms());
  sums_.assign(num_arms(), 0.0);
  counts_.assign(num_arms(), 0);
  phase_ = 0;
  last_elim_phase_ = 0;
}

void SuccessiveEliminationReset::branches(std::vector<Branch>& out) const {
  if (survivors_.size() == 1) {
    out.push_back({survivors_[0], 1.0, survivors_[0]});
    return;
  }
  for (ArmId a : survivors_)
    if (pending_in_phase_[a]) out.push_back({a, 1.0 / pending_count_, a});
}

void SuccessiveEliminationReset::do_observe(ArmId arm, double reward) {
  if (survivors_.size() == 1) return;
  sums_[arm] += reward;
  ++counts_[arm];
  pending_in_phase_[arm] = false;
  if (--pending_count_ > 0) return;

  ++phase_;
  double best = -1.0;
  for (ArmId a : survivors_) best = std::max(best, sums_[a] / counts_[a]);
  const double threshold = width_ / std::sqrt(static_cast<double>(phase_));
  std::vector<ArmId> kept;
  for (ArmId a : survivors_)
    if (!(best - sums_[a] / counts_[a] > threshold)) kept.push_back(a);
  if (kept.size() < survivors_.size()) {
    survivors_ = std::move(kept);
    last_elim_phase_ = phase_;
    phase_ = 0;
    std::fill(sums_.begin(), sums_.end(), 0.0);
    std::fill(counts_.begin(), counts_.end(), 0);
  }
  for (ArmId a : survivors_) pending_in_phase_[a] = true;
  pending_count_ = static_cast<int>(survivors_.size());
}

std::unique_ptr<BanditAlgorithm> SuccessiveEliminationReset::clone() const {
  return std::make_unique<SuccessiveEliminationReset>(*this);
}

void SuccessiveEliminationReset::state_key(std::vector<std::int64_t>& key) const {
  key.push_back(phase_);
  key.push_back(static_cast<std::int64_t>(survivors_.size()));
  for (ArmId a : survivors_) key.push_back(static_cast<std::int64_t>(a));
  for (ArmId a = 0; a < num_arms(); ++a) {
    key.push_back(pending_in_phase_[a]);
    key.push_back(counts_[a]);
    key.push_back(bits(sums_[a]));
  }
}

// ------------------------------------------------------------ MixedGreedy

MixedGreedy::MixedGreedy(std::unique_ptr<BanditAlgorithm> base, const PriorSpec& prior, double p,
                         int n0, std::uint64_t seed)
    : BanditAlgorithm(base ? base->num_arms() : 0, seed),
      base_(std::move(base)),
      initial_(prior),
      posterior_(prior),
      p_(p),
      n0_(n0) {
  if (base_->num_arms() != prior.num_arms())
    throw std::invalid_argument("MixedGreedy: base and prior disagree on the number of arms");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("MixedGreedy: p must lie in [0,1]");
  if (n0 < 1) throw std::invalid_argument("MixedGreedy: n0 must be at least 1");
  base_->set_record_steps(false);
}

MixedGreedy::MixedGreedy(const MixedGreedy& other)
    : BanditAlgorithm(other),
      base_(other.base_->clone()),
      initial_(other.initial_),
      posterior_(other.posterior_),
      p_(other.p_),
      n0_(other.n0_),
      greedy_step_(other.greedy_step_) {}

void MixedGreedy::branches(std::vector<Branch>& out) const {
  const std::size_t first = out.size();
  base_->branches(out);
  const bool mixing = steps_done() + 1 >= n0_;
  for (std::size_t i = first; i < out.size(); ++i) {
    out[i].tag <<= 1;
    if (mixing) out[i].prob *= 1.0 - p_;
  }
  if (mixing && p_ > 0.0) out.push_back({posterior_.argmax_mean(), p_, 1});
}

void MixedGreedy::do_take(const Branch& b) {
  greedy_step_ = (b.tag & 1) != 0;
  if (!greedy_step_) base_->take({b.arm, b.prob, b.tag >> 1});
}

void MixedGreedy::do_observe(ArmId arm, double reward) {
  if (greedy_step_) return;
  base_->observe(arm, reward);
  posterior_.update(arm, reward);
}

void MixedGreedy::do_reset() {
  base_->reset();
  posterior_ = initial_;
  greedy_step_ = false;
}

std::unique_ptr<BanditAlgorithm> MixedGreedy::clone() const {
  return std::make_unique<MixedGreedy>(*this);
}

void MixedGreedy::state_key(std::vector<std::int64_t>& key) const {
  key.push_back(std::min(steps_done(), n0_));
  for (ArmId a = 0; a < num_arms(); ++a) {
    key.push_back(posterior_.successes(a));
    key.push_back(posterior_.failures(a));
  }
  base_->state_key(key);
}

nlohmann::json MixedGreedy::parameters() const {
  return {{"base", {{"name", base_->name()}, {"parameters", base_->parameters()}}},
          {"p", p_},
          {"n0", n0_}};
}

}  // namespace duel
