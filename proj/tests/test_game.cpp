#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "duel/game.hpp"
#include "duel/oracle.hpp"
#include "fixtures.hpp"

using namespace duel;

namespace {

std::vector<double> curve(double c, double gamma, int n) {
  std::vector<double> r(n);
  for (int i = 1; i <= n; ++i) r[i - 1] = 0.9 - c * std::pow(i, -gamma);
  return r;
}

std::vector<double> rew_of(const AlgorithmSpec& a, int T) {
  const auto e = exact_rew(a, fx::oracle_prior(), T, T);
  std::vector<double> r(T);
  for (int n = 1; n <= T; ++n) r[n - 1] = e.rew_at(n);
  return r;
}

}  // namespace

TEST(Schedule, SwappingPrincipalsMirrors) {
  const auto a = curve(0.3, 0.5, 400), b = curve(0.2, 0.3, 400);
  const auto f = ResponseFunction::softmax(0.1, 4);
  const auto s = compute_schedule(a, b, f, 400);
  const auto m = compute_schedule(b, a, f, 400);
  for (int t = 1; t <= 400; ++t) EXPECT_NEAR(s.p_at(t), 1 - m.p_at(t), 1e-12) << t;
}

TEST(Schedule, IdenticalCurvesStayTied) {
  const auto a = curve(0.3, 0.5, 100);
  for (const auto& f : {ResponseFunction::hardmax(), ResponseFunction::softmax(0.2, 3)}) {
    const auto s = compute_schedule(a, a, f, 100);
    for (int t = 1; t <= 100; ++t) EXPECT_NEAR(s.p_at(t), 0.5, 1e-12);
  }
  // a biased tie hands principal 1 more data, and the lead sticks
  const auto b = compute_schedule(a, a, ResponseFunction::hardmax(0.7), 100);
  EXPECT_EQ(b.p_at(1), 0.7);
  for (int t = 2; t <= 100; ++t) EXPECT_EQ(b.p_at(t), 1.0);
}

TEST(Schedule, MassIsConservedOnLongHorizons) {
  const int T = 100000;
  const auto s = compute_schedule(curve(0.3, 0.5, T), curve(0.25, 0.4, T), ResponseFunction::softmax(0.1, 4), T);
  EXPECT_LE(s.max_mass_error, 1e-10);
  EXPECT_FALSE(s.clamped);
}

TEST(Schedule, ShortProfiles) {
  const auto a = curve(0.3, 0.5, 10);
  EXPECT_THROW(compute_schedule(a, a, ResponseFunction::softmax(0.1, 4), 20), std::invalid_argument);
  ScheduleOptions o;
  o.allow_clamp = true;
  const auto s = compute_schedule(a, a, ResponseFunction::softmax(0.1, 4), 20, o);
  EXPECT_TRUE(s.clamped);
  EXPECT_EQ(s.first_clamped_round, 11);
  EXPECT_THROW(compute_schedule(a, a, ResponseFunction::uniform(), 0), std::invalid_argument);
}

TEST(Schedule, PosteriorRecursionByHand) {
  // rew1 = (0.2, 0.8), rew2 = (0.5, 0.5); softmax keeps both branches alive
  const auto f = ResponseFunction::softmax(0.1, 4);
  ScheduleOptions o;
  o.keep_posteriors = true;
  const auto s = compute_schedule({0.2, 0.8, 0.8}, {0.5, 0.5, 0.5}, f, 3, o);
  const double p1 = f(-0.3);
  EXPECT_DOUBLE_EQ(s.p_at(1), p1);
  EXPECT_NEAR(s.pmr1[1], (1 - p1) * 0.2 + p1 * 0.8, 1e-15);
  EXPECT_NEAR(s.pmr2[1], 0.5, 1e-15);
  ASSERT_EQ(s.posteriors.size(), 3u);
  EXPECT_NEAR(s.posteriors[1].probs[1], p1, 1e-15);
}

TEST(SuddenDeath, Cases) {
  const int T = 12;
  const auto dg = rew_of(AlgorithmSpec::dynamic_greedy(), T);
  const auto sg = rew_of(AlgorithmSpec::static_greedy(), T);
  const auto lock = sudden_death_check(compute_schedule(dg, sg, ResponseFunction::hardmax(), T));
  ASSERT_TRUE(lock.has_value());
  EXPECT_EQ(lock->round, 2);
  EXPECT_EQ(lock->leader, 1);

  const auto swapped = sudden_death_check(compute_schedule(sg, dg, ResponseFunction::hardmax(), T));
  ASSERT_TRUE(swapped.has_value());
  EXPECT_EQ(swapped->leader, 2);

  EXPECT_FALSE(sudden_death_check(compute_schedule(dg, dg, ResponseFunction::hardmax(), T)).has_value());

  // a lead that is lost
  GameSchedule g;
  g.horizon = 3;
  g.pmr1 = {0.5, 0.6, 0.4};
  g.pmr2 = {0.5, 0.5, 0.5};
  g.p = {0.5, 1, 0};
  try {
    sudden_death_check(g);
    FAIL();
  } catch (const SuddenDeathViolation& v) {
    EXPECT_EQ(v.lock_round(), 2);
    EXPECT_EQ(v.violating_round(), 3);
  }
}

TEST(Simulate, CertainWinnerTakesAll) {
  GameSchedule s;
  s.horizon = 50;
  s.p.assign(50, 1.0);
  s.pmr1.assign(50, 0.5);
  s.pmr2.assign(50, 0.5);
  const auto tr = simulate(AlgorithmSpec::dynamic_greedy(), AlgorithmSpec::static_greedy(), fx::oracle_prior(), s,
                           UtilityFunction::market_share(), 4);
  EXPECT_EQ(tr.n1, 50);
  EXPECT_EQ(tr.n2, 0);
  EXPECT_EQ(tr.utility1(), 50.0);
  for (int t = 1; t <= 50; ++t) EXPECT_EQ(tr.local_step[t - 1], t);
}

TEST(Simulate, ShareMatchesScheduleAndIsDeterministic) {
  const int T = 60;
  const auto s = compute_schedule(curve(0.3, 0.5, T), curve(0.2, 0.3, T), ResponseFunction::softmax(0.1, 4), T);
  double want = 0;
  for (double p : s.p) want += p;
  const int R = 3000;
  double sum = 0, sumsq = 0;
  for (int r = 0; r < R; ++r) {
    const auto tr = simulate(AlgorithmSpec::explore_then_exploit(2), AlgorithmSpec::dynamic_greedy(),
                             fx::oracle_prior(), s, UtilityFunction::market_share(), derive_seed(5, "t", r));
    EXPECT_EQ(tr.utility1() + tr.utility2(), T);
    sum += tr.n1;
    sumsq += double(tr.n1) * tr.n1;
  }
  const double mean = sum / R, se = std::sqrt((sumsq / R - mean * mean) / (R - 1));
  EXPECT_NEAR(mean, want, 3 * se);

  const auto x = simulate(AlgorithmSpec::explore_then_exploit(2), AlgorithmSpec::dynamic_greedy(),
                          fx::oracle_prior(), s, UtilityFunction::reward_dependent(0.5, 1), 99);
  const auto y = simulate(AlgorithmSpec::explore_then_exploit(2), AlgorithmSpec::dynamic_greedy(),
                          fx::oracle_prior(), s, UtilityFunction::reward_dependent(0.5, 1), 99);
  EXPECT_EQ(x.choice, y.choice);
  EXPECT_EQ(x.reward, y.reward);
  EXPECT_EQ(x.u1, y.u1);
}

TEST(ExpectedUtility, ClosedForm) {
  GameSchedule s;
  s.horizon = 2;
  s.p = {0.25, 1.0};
  s.pmr1 = {0.4, 0.6};
  s.pmr2 = {0.5, 0.3};
  const auto [m1, m2] = expected_utility(s, UtilityFunction::market_share());
  EXPECT_DOUBLE_EQ(m1, 1.25);
  EXPECT_DOUBLE_EQ(m2, 0.75);
  const auto u = UtilityFunction::reward_dependent(1, 3).with_weights({2.0});
  const auto [r1, r2] = expected_utility(s, u);
  EXPECT_NEAR(r1, 2 * 0.25 * 1.8 + 1 * 2.2, 1e-15);
  EXPECT_NEAR(r2, 2 * 0.75 * 2.0, 1e-15);
}

TEST(Utility, Validation) {
  EXPECT_THROW(UtilityFunction::reward_dependent(0, 1), std::invalid_argument);
  EXPECT_THROW(UtilityFunction::reward_dependent(2, 1), std::invalid_argument);
  EXPECT_THROW(UtilityFunction::market_share().with_weights({1, -1}), std::invalid_argument);
  EXPECT_THROW(UtilityFunction::discount_weights(0, 5), std::invalid_argument);
  const auto w = UtilityFunction::discount_weights(0.5, 3);
  EXPECT_EQ(w, (std::vector<double>{1, 0.5, 0.25}));
  const auto u = UtilityFunction::reward_dependent(1, 2).with_weights(w);
  EXPECT_EQ(UtilityFunction::from_json(u.to_json()).to_json(), u.to_json());
  EXPECT_EQ(u.weight(7), 1.0);
  EXPECT_THROW(UtilityFunction::from_json({{"kind", "market_share"}, {"discount", 0.9}}), std::invalid_argument);
}

TEST(Payoff, SingleEntryMenu) {
  const auto m = payoff_matrix({AlgorithmSpec::dynamic_greedy()}, fx::oracle_prior(), ResponseFunction::hardmax(), 10,
                               UtilityFunction::market_share(), 1);
  ASSERT_EQ(m.equilibria.size(), 1u);
  EXPECT_NEAR(m.cells[0][0].u1, 5.0, 1e-12);
  EXPECT_TRUE(m.exact);
}

TEST(Payoff, GreedyBeatsStatic) {
  const auto m = payoff_matrix({AlgorithmSpec::dynamic_greedy(), AlgorithmSpec::static_greedy()}, fx::oracle_prior(),
                               ResponseFunction::hardmax(), 12, UtilityFunction::market_share(), 1);
  ASSERT_EQ(m.equilibria.size(), 1u);
  EXPECT_EQ(m.equilibria[0], (std::pair<std::size_t, std::size_t>{0, 0}));
  EXPECT_NEAR(m.cells[0][1].u1, 11.5, 1e-12);
  EXPECT_NEAR(m.cells[1][0].u2, 11.5, 1e-12);
  EXPECT_EQ(m.labels.size(), 2u);
}
