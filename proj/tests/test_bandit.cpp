#include <gtest/gtest.h>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>

#include "duel/algorithm_spec.hpp"
#include "duel/bandit.hpp"
#include "duel/oracle.hpp"
#include "fixtures.hpp"

using namespace duel;

namespace {

std::vector<ArmId> run(BanditAlgorithm& alg, const std::vector<double>& rewards_by_arm, int steps) {
  std::vector<ArmId> seq;
  for (int i = 0; i < steps; ++i) {
    const ArmId a = alg.next_arm();
    alg.observe(a, rewards_by_arm[a]);
    seq.push_back(a);
  }
  return seq;
}

}  // namespace

TEST(Discipline, NextArmTwiceThrows) {
  StaticGreedy sg(2);
  sg.next_arm();
  EXPECT_THROW(sg.next_arm(), std::logic_error);
}

TEST(Discipline, ObserveWithoutPendingOrWrongArmThrows) {
  StaticGreedy sg(2);
  EXPECT_THROW(sg.observe(0, 1.0), std::logic_error);
  sg.next_arm();
  EXPECT_THROW(sg.observe(1, 1.0), std::logic_error);
}

TEST(DynamicGreedy, FollowsPosterior) {
  const auto p = fx::oracle_prior();
  DynamicGreedy dg(p);
  EXPECT_EQ(dg.next_arm(), 0u);
  dg.observe(0, 0.0);
  EXPECT_NEAR(dg.posterior().mean(0), 0.18, 1e-15);
  EXPECT_EQ(dg.next_arm(), 1u);

  DynamicGreedy up(p);
  up.next_arm();
  up.observe(0, 1.0);
  EXPECT_NEAR(up.posterior().mean(0), 0.82, 1e-15);
  EXPECT_EQ(up.next_arm(), 0u);

  DynamicGreedy first(PriorSpec({ArmPrior::point(0.5), ArmPrior::point(0.4)}, PriorSpec::Check::ArmsOnly));
  EXPECT_EQ(first.next_arm(), 0u);
}

TEST(DynamicGreedy, NeverPlaysDominatedArm) {
  const auto p = PriorSpec({ArmPrior::beta(2, 1), ArmPrior::beta(1, 1), ArmPrior::beta(1, 2)});
  DynamicGreedy dg(p, 3);
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    const auto& post = dg.posterior();
    const ArmId a = dg.next_arm();
    for (ArmId b = 0; b < 3; ++b) EXPECT_GE(post.mean(a), post.mean(b));
    dg.observe(a, rng.bernoulli(0.3 + 0.2 * a));
  }
}

TEST(StaticGreedy, IgnoresFeedback) {
  StaticGreedy sg(2);
  EXPECT_TRUE(sg.is_anytime());
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(sg.next_arm(), 0u);
    sg.observe(0, 0.0);
  }
}

TEST(ExploreThenExploit, ExploresEachArmMTimes) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ExploreThenExploit e(3, 4, 100, seed);
    const auto seq = run(e, {0.2, 0.9, 0.5}, 30);
    std::vector<int> c(3, 0);
    for (int i = 0; i < 12; ++i) ++c[seq[i]];
    EXPECT_EQ(c, (std::vector<int>{4, 4, 4}));
    for (int i = 12; i < 30; ++i) EXPECT_EQ(seq[i], 1u);
  }
  EXPECT_THROW(ExploreThenExploit(2, 6, 10), std::invalid_argument);
  EXPECT_FALSE(ExploreThenExploit(2, 1, 10).is_anytime());
}

TEST(ExploreThenExploit, OrderIsUniformPermutation) {
  int arm0_first = 0;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    ExploreThenExploit e(2, 1, 10, seed);
    arm0_first += e.next_arm() == 0;
  }
  EXPECT_NEAR(arm0_first / 4000.0, 0.5, 0.03);
}

TEST(ExploreThenExploit, AverageArgmaxFrozen) {
  ExploreThenExploit e(2, 2, 20, 1);
  for (int i = 0; i < 4; ++i) {
    const ArmId a = e.next_arm();
    e.observe(a, a == 0 ? 1.0 : 0.0);
  }
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(e.next_arm(), 0u);
    e.observe(0, 0.0);
  }
}

TEST(ExploreThenExploit, ExploitArmDistributionMatchesEnumeration) {
  // m = 2 on the oracle instance: arm 1 is exploited iff its two rewards
  // average strictly above arm 2's (ties to arm 1).
  const auto p = fx::oracle_prior();
  double pr_arm1 = 0;
  for (double mu1 : {0.1, 0.9})
    for (int s1 = 0; s1 <= 2; ++s1)
      for (int s2 = 0; s2 <= 2; ++s2) {
        const double w = 0.5 * boost::math::pdf(boost::math::binomial(2, mu1), s1) *
                         boost::math::pdf(boost::math::binomial(2, 0.4), s2);
        if (s1 >= s2) pr_arm1 += w;
      }
  const double exact5 = exact_rew(AlgorithmSpec::explore_then_exploit(2), p, 5, 5).rew_at(5);
  // rew(5) = sum over mu of Pr[exploit arm | mu] mu
  double ref5 = 0;
  for (double mu1 : {0.1, 0.9}) {
    double pa = 0;
    for (int s1 = 0; s1 <= 2; ++s1)
      for (int s2 = 0; s2 <= 2; ++s2)
        if (s1 >= s2)
          pa += boost::math::pdf(boost::math::binomial(2, mu1), s1) * boost::math::pdf(boost::math::binomial(2, 0.4), s2);
    ref5 += 0.5 * (pa * mu1 + (1 - pa) * 0.4);
  }
  EXPECT_NEAR(exact5, ref5, 1e-14);

  Rng rng(5);
  int hits = 0;
  const int n = 40000;
  for (int r = 0; r < n; ++r) {
    const auto mu = p.sample_instance(rng);
    ExploreThenExploit e(2, 2, 10, derive_seed(4, "ete", r));
    for (int i = 0; i < 4; ++i) {
      const ArmId a = e.next_arm();
      e.observe(a, rng.bernoulli(mu[a]));
    }
    hits += e.exploit_arm() == 0;
  }
  const double se = std::sqrt(pr_arm1 * (1 - pr_arm1) / n);
  EXPECT_NEAR(hits / double(n), pr_arm1, 4 * se);
}

TEST(PhasedEE, ScheduleGuard) {
  auto raw = [](long long t) { return static_cast<long long>(std::ceil(std::sqrt(double(t)))); };
  EXPECT_THROW(PhasedExploreExploit(2, raw, "raw", 100), std::invalid_argument);
  auto shrinking = [](long long t) { return t < 3 ? 5LL : 3LL; };
  EXPECT_THROW(PhasedExploreExploit(2, shrinking, "shrink", 100), std::invalid_argument);
  EXPECT_NO_THROW(PhasedExploreExploit(2, named_schedule("sqrt", 2), "sqrt", 100));
}

TEST(PhasedEE, KExploreSlotsPerPhase) {
  const auto sched = named_schedule("sqrt", 2);
  PhasedExploreExploit pe(2, sched, "sqrt", 1000, 8);
  // phases: lengths max(2, ceil(sqrt t))
  long long t = 1, pos = 0;
  for (int step = 0; step < 400; ++step) {
    const ArmId a = pe.next_arm();
    pe.observe(a, a == 0 ? 0.9 : 0.1);
    ++pos;
    if (pos == sched(t)) {
      ++t;
      pos = 0;
    }
  }
  EXPECT_EQ(pe.phase(), t);
}

TEST(PhasedEE, DeterministicRewardsExploitBestFromPhaseTwo) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sched = named_schedule("sqrt", 2);
    PhasedExploreExploit pe(2, sched, "sqrt", 2000, seed);
    std::vector<ArmId> seq = run(pe, {0.9, 0.1}, 500);
    // Phase 1 is steps 1-2; in every later phase all non-exploring steps hit arm 1.
    long long t = 1, start = 0;
    while (start < 500) {
      const long long len = sched(t);
      int arm2 = 0;
      for (long long i = start; i < std::min<long long>(start + len, 500); ++i) arm2 += seq[i] == 1;
      if (t >= 2) EXPECT_LE(arm2, 1) << "phase " << t;
      if (start + len <= 500) EXPECT_EQ(arm2, 1) << "phase " << t;
      start += len;
      ++t;
    }
  }
}

TEST(SuccElim, SingleArmAndReset) {
  SuccessiveEliminationReset one(1, 100, 0.1);
  for (ArmId a : run(one, {0.3}, 50)) EXPECT_EQ(a, 0u);
  EXPECT_EQ(one.last_elimination_phase(), 0);
}

TEST(SuccElim, DeterministicEliminationPhase) {
  // arm 2 goes at the first phase t with 0.8 > ln(1e5) / sqrt(t)
  int expected = 1;
  while (!(0.8 > std::log(1e5) / std::sqrt(double(expected)))) ++expected;
  EXPECT_EQ(expected, 208);
  SuccessiveEliminationReset se(2, 10000, 0.1, 3);
  int phase_at_elim = 0;
  for (int step = 0; step < 1000 && phase_at_elim == 0; ++step) {
    const ArmId a = se.next_arm();
    se.observe(a, a == 0 ? 0.9 : 0.1);
    phase_at_elim = se.last_elimination_phase();
  }
  EXPECT_EQ(phase_at_elim, expected);
  EXPECT_EQ(se.survivors(), std::vector<ArmId>{0});
  EXPECT_EQ(se.pulls_since_reset(0), 0);
  EXPECT_EQ(se.pulls_since_reset(1), 0);
  for (ArmId a : run(se, {0.9, 0.1}, 100)) EXPECT_EQ(a, 0u);
}

TEST(SuccElim, RoundRobinWithinPhase) {
  SuccessiveEliminationReset se(3, 1000, 0.1, 11);
  const auto seq = run(se, {0.5, 0.5, 0.5}, 30);
  for (int ph = 0; ph < 10; ++ph) {
    std::vector<int> c(3, 0);
    for (int i = 0; i < 3; ++i) ++c[seq[3 * ph + i]];
    EXPECT_EQ(c, (std::vector<int>{1, 1, 1}));
  }
}

TEST(Replay, SameSeedSameSequence) {
  const auto p = fx::flat_beta();
  for (const auto& spec : {AlgorithmSpec::dynamic_greedy(), AlgorithmSpec::explore_then_exploit(5),
                           AlgorithmSpec::phased("sqrt"), AlgorithmSpec::succ_elim_reset(0.1),
                           AlgorithmSpec::mixed_greedy(AlgorithmSpec::explore_then_exploit(5), 0.4, 3)}) {
    auto a = make_algorithm(spec, p, 200, 99);
    auto b = make_algorithm(spec, p, 200, 99);
    Rng ra(1), rb(1);
    for (int i = 0; i < 200; ++i) {
      const ArmId x = a->next_arm(), y = b->next_arm();
      ASSERT_EQ(x, y) << spec.label();
      a->observe(x, ra.bernoulli(0.5));
      b->observe(y, rb.bernoulli(0.5));
    }
    // reset replays too
    a->reset();
    auto c = make_algorithm(spec, p, 200, 99);
    for (int i = 0; i < 20; ++i) {
      const ArmId x = a->next_arm(), y = c->next_arm();
      ASSERT_EQ(x, y);
      a->observe(x, 1);
      c->observe(y, 1);
    }
  }
}

TEST(MixedGreedy, GreedyStepsDoNotFeedBase) {
  const auto p = fx::oracle_prior();
  MixedGreedy mg(std::make_unique<ExploreThenExploit>(2, 1, 50, 1), p, 0.5, 1, 2);
  Rng rng(3);
  int base_steps = 0;
  for (int i = 0; i < 40; ++i) {
    const ArmId a = mg.next_arm();
    mg.observe(a, rng.bernoulli(0.5));
    if (!mg.last_step_greedy()) ++base_steps;
    EXPECT_EQ(mg.base().steps_done(), base_steps);
  }
  EXPECT_THROW(MixedGreedy(std::make_unique<StaticGreedy>(2), p, 1.5, 1), std::invalid_argument);
  EXPECT_THROW(MixedGreedy(std::make_unique<StaticGreedy>(2), p, 0.5, 0), std::invalid_argument);
}

TEST(MixedGreedy, PZeroMatchesBase) {
  const auto p = fx::oracle_prior();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MixedGreedy mg(std::make_unique<ExploreThenExploit>(2, 3, 50, seed), p, 0.0, 1, seed);
    ExploreThenExploit base(2, 3, 50, seed);
    Rng rng(seed);
    for (int i = 0; i < 30; ++i) {
      const ArmId a = mg.next_arm(), b = base.next_arm();
      ASSERT_EQ(a, b);
      const double r = rng.bernoulli(0.5);
      mg.observe(a, r);
      base.observe(b, r);
    }
  }
}

TEST(MixedGreedy, BaseLengthIsBinomial) {
  // after n steps: n0 - 1 + Bin(n - n0 + 1, 1 - p)
  const int n = 20, n0 = 4;
  const double p = 0.3;
  const int reps = 20000;
  std::map<int, int> hist;
  Rng rng(17);
  for (int r = 0; r < reps; ++r) {
    MixedGreedy mg(std::make_unique<StaticGreedy>(2), fx::oracle_prior(), p, n0, derive_seed(2, "mg", r));
    for (int i = 0; i < n; ++i) {
      const ArmId a = mg.next_arm();
      mg.observe(a, rng.bernoulli(0.5));
    }
    ++hist[mg.base().steps_done()];
  }
  const boost::math::binomial bin(n - n0 + 1, 1 - p);
  double chi2 = 0;
  int cells = 0;
  for (int k = 0; k <= n - n0 + 1; ++k) {
    const double e = reps * boost::math::pdf(bin, k);
    if (e < 5) {
      EXPECT_LE(hist[n0 - 1 + k], 5 * std::max(1.0, e) + 10);
      continue;
    }
    chi2 += std::pow(hist[n0 - 1 + k] - e, 2) / e;
    ++cells;
  }
  for (const auto& [len, cnt] : hist) EXPECT_GE(len, n0 - 1);
  const double crit = boost::math::quantile(boost::math::chi_squared(cells - 1), 0.999);
  EXPECT_LT(chi2, crit);
}

TEST(AlgorithmSpec, JsonRoundTripAndLabels) {
  const char* docs[] = {R"({"name":"DynamicGreedy"})",
                        R"({"name":"ExploreThenExploit","m":10})",
                        R"({"name":"ExploreThenExploit","m":"T^2/3"})",
                        R"({"name":"PhasedEE","schedule":"doubling"})",
                        R"({"name":"SuccElimReset","delta":0.1})",
                        R"({"name":"MixedGreedy","base":{"name":"ExploreThenExploit","m":1},"p":0.3,"n0":3})"};
  for (const char* d : docs) {
    const auto spec = AlgorithmSpec::from_json(nlohmann::json::parse(d));
    EXPECT_EQ(AlgorithmSpec::from_json(spec.to_json()).to_json(), spec.to_json());
  }
  EXPECT_EQ(AlgorithmSpec::explore_then_exploit(10).label(), "ETE(10)");
  EXPECT_THROW(AlgorithmSpec::from_json(nlohmann::json::parse(R"({"name":"UCB1"})")), std::invalid_argument);
  EXPECT_THROW(AlgorithmSpec::from_json(nlohmann::json::parse(R"({"name":"SuccElimReset","delta":0.1,"x":1})")),
               std::invalid_argument);
  EXPECT_EQ(AlgorithmSpec::explore_then_exploit_two_thirds().resolved_m(1000), 100);
  EXPECT_EQ(AlgorithmSpec::explore_then_exploit_two_thirds().resolved_m(4096), 256);
}
