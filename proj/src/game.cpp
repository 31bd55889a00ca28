#include "duel/game.hpp"

#include <cmath>
#include <numeric>

#include "duel/format.hpp"
#include "duel/oracle.hpp"
#include "duel/profile.hpp"

namespace duel {

namespace {

constexpr double kTailTrim = 1e-20;

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

double lookup(const std::vector<double>& rew, int n, bool allow_clamp, bool& clamped) {
  if (n <= static_cast<int>(rew.size())) return rew[n - 1];
  if (!allow_clamp)
    throw std::invalid_argument("compute_schedule: profile covers " + std::to_string(rew.size()) +
                                " steps, step " + std::to_string(n) + " needed");
  clamped = true;
  return rew.back();
}

}  // namespace

double CountPosterior::mass() const {
  Kahan k;
  for (double x : probs) k.add(x);
  return k.sum;
}

void GameSchedule::write_csv(std::ostream& os) const {
  os << "t,pmr1,pmr2,p\n";
  for (int t = 1; t <= horizon; ++t)
    os << t << ',' << format_double(pmr1[t - 1]) << ',' << format_double(pmr2[t - 1]) << ','
       << format_double(p[t - 1]) << '\n';
}

GameSchedule compute_schedule(const std::vector<double>& rew1, const std::vector<double>& rew2,
                              const ResponseFunction& f, int T, ScheduleOptions opts) {
  if (T < 1) throw std::invalid_argument("compute_schedule: T must be positive");
  if (rew1.empty() || rew2.empty()) throw std::invalid_argument("compute_schedule: empty profile");
  GameSchedule s;
  s.horizon = T;
  s.p.resize(T);
  s.pmr1.resize(T);
  s.pmr2.resize(T);

  // probs[k] = Pr[n_1(t) = lo + k]; support outside [lo, lo + size) has mass 0.
  CountPosterior cur;
  cur.t = 1;
  cur.lo = 0;
  cur.probs = {1.0};
  std::vector<double> nxt;
  for (int t = 1; t <= T; ++t) {
    Kahan m1, m2;
    bool clamped = false;
    for (std::size_t k = 0; k < cur.probs.size(); ++k) {
      const double w = cur.probs[k];
      if (w == 0.0) continue;
      const int n = cur.lo + static_cast<int>(k);
      m1.add(w * lookup(rew1, n + 1, opts.allow_clamp, clamped));
      m2.add(w * lookup(rew2, t - n, opts.allow_clamp, clamped));
    }
    if (clamped && !s.clamped) {
      s.clamped = true;
      s.first_clamped_round = t;
    }
    const double pmr1 = std::clamp(m1.sum, 0.0, 1.0);
    const double pmr2 = std::clamp(m2.sum, 0.0, 1.0);
    const double p = f.evaluate(pmr1 - pmr2);
    s.pmr1[t - 1] = pmr1;
    s.pmr2[t - 1] = pmr2;
    s.p[t - 1] = p;
    s.max_mass_error = std::max(s.max_mass_error, std::abs(cur.mass() - 1.0));
    if (opts.keep_posteriors) s.posteriors.push_back(cur);
    if (t == T) break;

    // N_{t+1}(n) = p N_t(n-1) + (1-p) N_t(n); plateau values 0 and 1 keep the
    // support from widening.
    if (p == 1.0) {
      ++cur.lo;
    } else if (p != 0.0) {
      nxt.assign(cur.probs.size() + 1, 0.0);
      for (std::size_t k = 0; k < cur.probs.size(); ++k) {
        nxt[k] += (1.0 - p) * cur.probs[k];
        nxt[k + 1] += p * cur.probs[k];
      }
      // drop negligible tails; the lost mass stays far below the 1e-10 budget
      std::size_t a = 0, z = nxt.size();
      while (a + 1 < z && nxt[a] < kTailTrim) ++a;
      while (z > a + 1 && nxt[z - 1] < kTailTrim) --z;
      cur.lo += static_cast<int>(a);
      cur.probs.assign(nxt.begin() + a, nxt.begin() + z);
    }
    cur.t = t + 1;
  }
  return s;
}

SuddenDeathViolation::SuddenDeathViolation(int lock_round, int violating_round)
    : std::runtime_error("sudden death: lead taken at round " + std::to_string(lock_round) +
                         " is lost at round " + std::to_string(violating_round)),
      lock_round_(lock_round),
      violating_round_(violating_round) {}

std::optional<SuddenDeath> sudden_death_check(const GameSchedule& s) {
  for (int t = 1; t <= s.horizon; ++t) {
    const double d = s.pmr1[t - 1] - s.pmr2[t - 1];
    if (std::abs(d) < kTieTolerance) continue;
    const int leader = d > 0 ? 1 : 2;
    for (int u = t + 1; u <= s.horizon; ++u) {
      const double e = s.pmr1[u - 1] - s.pmr2[u - 1];
      const bool holds = leader == 1 ? e >= kTieTolerance : e <= -kTieTolerance;
      if (!holds) throw SuddenDeathViolation(t, u);
    }
    return SuddenDeath{t, leader};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- utility

UtilityFunction UtilityFunction::market_share() { return UtilityFunction(); }

UtilityFunction UtilityFunction::reward_dependent(double u0, double u1) {
  if (!(u0 > 0.0)) throw std::invalid_argument("utility: U(0) must be positive");
  if (!(u1 >= u0)) throw std::invalid_argument("utility: U must be non-decreasing");
  UtilityFunction u;
  u.market_share_ = false;
  u.u0_ = u0;
  u.u1_ = u1;
  return u;
}

UtilityFunction UtilityFunction::with_weights(std::vector<double> weights) const {
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("utility: weights must be non-negative");
  UtilityFunction u = *this;
  u.weights_ = std::move(weights);
  return u;
}

std::vector<double> UtilityFunction::discount_weights(double gamma, int T) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("utility: discount must lie in (0,1]");
  std::vector<double> w(T);
  double x = 1.0;
  for (int t = 0; t < T; ++t, x *= gamma) w[t] = x;
  return w;
}

double UtilityFunction::weight(int t) const {
  return t <= static_cast<int>(weights_.size()) ? weights_[t - 1] : 1.0;
}

nlohmann::json UtilityFunction::to_json() const {
  nlohmann::json j;
  if (market_share_)
    j = {{"kind", "market_share"}};
  else
    j = {{"kind", "reward"}, {"u0", u0_}, {"u1", u1_}};
  if (!weights_.empty()) j["weights"] = weights_;
  return j;
}

UtilityFunction UtilityFunction::from_json(const nlohmann::json& doc) {
  for (const auto& [k, _] : doc.items())
    if (k != "kind" && k != "u0" && k != "u1" && k != "weights")
      throw std::invalid_argument("utility: unknown field '" + k + "'");
  const auto kind = doc.value("kind", std::string("market_share"));
  UtilityFunction u;
  if (kind == "market_share")
    u = market_share();
  else if (kind == "reward")
    u = reward_dependent(doc.at("u0").get<double>(), doc.at("u1").get<double>());
  else
    throw std::invalid_argument("utility: unknown kind '" + kind + "'");
  if (doc.contains("weights")) u = u.with_weights(doc["weights"].get<std::vector<double>>());
  return u;
}

// ---------------------------------------------------------------- traces

void GameTrace::write_csv(std::ostream& os) const {
  os << "t,i,arm,reward,u1,u2\n";
  for (std::size_t t = 0; t < choice.size(); ++t)
    os << t + 1 << ',' << choice[t] << ',' << arm[t] + 1 << ',' << format_double(reward[t]) << ','
       << format_double(u1[t]) << ',' << format_double(u2[t]) << '\n';
}

GameTrace simulate(const AlgorithmSpec& alg1, const AlgorithmSpec& alg2, const PriorSpec& prior,
                   const GameSchedule& schedule, const UtilityFunction& utility, std::uint64_t seed,
                   RewardModel model) {
  const int T = schedule.horizon;
  GameTrace tr;
  tr.seed = seed;
  Rng instance_rng(derive_seed(seed, "instance"));
  tr.mu = prior.sample_instance(instance_rng);
  std::unique_ptr<BanditAlgorithm> algs[2] = {
      make_algorithm(alg1, prior, T, derive_seed(seed, "algorithm", 1)),
      make_algorithm(alg2, prior, T, derive_seed(seed, "algorithm", 2))};
  for (auto& a : algs) a->set_record_steps(false);
  Rng choice_rng(derive_seed(seed, "choice"));
  std::vector<Rng> reward_rng;
  for (ArmId a = 0; a < prior.num_arms(); ++a) reward_rng.emplace_back(derive_seed(seed, "reward", a));

  tr.choice.reserve(T);
  double u1 = 0.0, u2 = 0.0;
  for (int t = 1; t <= T; ++t) {
    const int i = choice_rng.bernoulli(schedule.p[t - 1]) ? 1 : 2;
    auto& alg = *algs[i - 1];
    const ArmId a = alg.next_arm();
    const double r = model == RewardModel::Deterministic ? tr.mu[a] : (reward_rng[a].bernoulli(tr.mu[a]) ? 1.0 : 0.0);
    alg.observe(a, r);
    const double gain = utility.weight(t) * utility(r);
    (i == 1 ? u1 : u2) += gain;
    (i == 1 ? tr.n1 : tr.n2) += 1;
    tr.choice.push_back(i);
    tr.local_step.push_back(alg.steps_done());
    tr.arm.push_back(a);
    tr.reward.push_back(r);
    tr.u1.push_back(u1);
    tr.u2.push_back(u2);
  }
  return tr;
}

std::pair<double, double> expected_utility(const GameSchedule& s, const UtilityFunction& u) {
  Kahan e1, e2;
  for (int t = 1; t <= s.horizon; ++t) {
    const double w = u.weight(t);
    const double p = s.p[t - 1];
    e1.add(w * p * (u.u0() + (u.u1() - u.u0()) * s.pmr1[t - 1]));
    e2.add(w * (1.0 - p) * (u.u0() + (u.u1() - u.u0()) * s.pmr2[t - 1]));
  }
  return {e1.sum, e2.sum};
}

// ---------------------------------------------------------------- payoffs

nlohmann::json PayoffMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < cells[i].size(); ++j) {
      const auto& c = cells[i][j];
      row.push_back({{"row", labels[i]},
                     {"col", labels[j]},
                     {"u1", c.u1},
                     {"u1_se", c.u1_se},
                     {"u2", c.u2},
                     {"u2_se", c.u2_se},
                     {"share1", c.share1},
                     {"share1_se", c.share1_se},
                     {"equilibrium", c.equilibrium}});
    }
    rows.push_back(row);
  }
  nlohmann::json eq = nlohmann::json::array();
  for (auto [i, j] : equilibria) eq.push_back({labels[i], labels[j]});
  return {{"labels", labels}, {"exact", exact}, {"cells", rows}, {"equilibria", eq}};
}

PayoffMatrix payoff_matrix(const std::vector<AlgorithmSpec>& menu, const PriorSpec& prior,
                           const ResponseFunction& f, int T, const UtilityFunction& utility,
                           std::uint64_t seed, PayoffOptions opts) {
  if (menu.empty()) throw std::invalid_argument("payoff_matrix: empty menu");
  const std::size_t k = menu.size();
  std::vector<std::vector<double>> rew(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (opts.replicates == 0) {
      rew[i] = exact_rew(menu[i], prior, T, T).rew;
    } else {
      const int r = opts.profile_replicates > 0 ? opts.profile_replicates : opts.replicates;
      ProfileOptions po;
      po.workers = opts.workers;
      rew[i] = estimate_profile(menu[i], prior, T, r, derive_seed(seed, "profile"), po).rew_mean;
    }
  }
  return payoff_matrix_from_curves(menu, rew, prior, f, T, utility, seed, opts);
}

PayoffMatrix payoff_matrix_from_curves(const std::vector<AlgorithmSpec>& menu,
                                       const std::vector<std::vector<double>>& rew, const PriorSpec& prior,
                                       const ResponseFunction& f, int T, const UtilityFunction& utility,
                                       std::uint64_t seed, PayoffOptions opts) {
  const std::size_t k = menu.size();
  if (rew.size() != k) throw std::invalid_argument("payoff_matrix: one rew curve per menu entry required");
  PayoffMatrix out;
  out.exact = opts.replicates == 0;
  for (const auto& a : menu) out.labels.push_back(a.label());

  out.cells.assign(k, std::vector<PayoffCell>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      ScheduleOptions so;
      so.allow_clamp = opts.allow_clamp;
      const GameSchedule s = compute_schedule(rew[i], rew[j], f, T, so);
      PayoffCell& c = out.cells[i][j];
      if (out.exact) {
        std::tie(c.u1, c.u2) = expected_utility(s, utility);
        c.share1 = std::accumulate(s.p.begin(), s.p.end(), 0.0) / T;
        continue;
      }
      const std::uint64_t cell_seed = derive_seed(derive_seed(seed, "cell", i), "col", j);
      const int n = opts.replicates;
      double s1 = 0, q1 = 0, s2 = 0, q2 = 0, sh = 0, qh = 0;
      for (int r = 0; r < n; ++r) {
        const GameTrace tr = simulate(menu[i], menu[j], prior, s, utility, derive_seed(cell_seed, "trace", r));
        const double a = tr.utility1(), b = tr.utility2(), h = static_cast<double>(tr.n1) / T;
        s1 += a, q1 += a * a, s2 += b, q2 += b * b, sh += h, qh += h * h;
      }
      auto se = [n](double s, double q) {
        const double m = s / n;
        return n > 1 ? std::sqrt(std::max(0.0, (q - n * m * m) / (n - 1)) / n) : 0.0;
      };
      c.u1 = s1 / n, c.u1_se = se(s1, q1);
      c.u2 = s2 / n, c.u2_se = se(s2, q2);
      c.share1 = sh / n, c.share1_se = se(sh, qh);
    }
  }

  // A cell is an equilibrium if no unilateral deviation gains more than two
  // combined standard errors (exact payoffs: more than 1e-12).
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const PayoffCell& c = out.cells[i][j];
      bool stable = true;
      for (std::size_t d = 0; d < k && stable; ++d) {
        const PayoffCell& row_dev = out.cells[d][j];
        const double band1 = out.exact ? 1e-12 : 2.0 * std::hypot(c.u1_se, row_dev.u1_se);
        if (row_dev.u1 - c.u1 > band1) stable = false;
        const PayoffCell& col_dev = out.cells[i][d];
        const double band2 = out.exact ? 1e-12 : 2.0 * std::hypot(c.u2_se, col_dev.u2_se);
        if (col_dev.u2 - c.u2 > band2) stable = false;
      }
      out.cells[i][j].equilibrium = stable;
      if (stable) out.equilibria.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace duel
