#include <gtest/gtest.h>

#include <cmath>

#include "duel/response.hpp"

using namespace duel;

TEST(Response, HardMaxValues) {
  const auto f = ResponseFunction::hardmax();
  EXPECT_EQ(f(0.1), 1.0);
  EXPECT_EQ(f(-0.1), 0.0);
  EXPECT_EQ(f(0.0), 0.5);
  EXPECT_EQ(f(1e-13), 0.5);
  EXPECT_EQ(ResponseFunction::hardmax(0.7)(0.0), 0.7);
  EXPECT_THROW(f(1.5), std::domain_error);
  EXPECT_THROW(f(std::nan("")), std::domain_error);
  EXPECT_THROW(ResponseFunction::hardmax(1.2), std::invalid_argument);
}

TEST(Response, HardMaxRandomValues) {
  const auto f = ResponseFunction::hardmax_random(0.1);
  EXPECT_EQ(f(0.3), 0.9);
  EXPECT_EQ(f(-0.3), 0.1);
  EXPECT_EQ(f(0.0), 0.5);
  const auto g = ResponseFunction::hardmax_random(0.2, 0.7, 0.5);
  EXPECT_EQ(g(1.0), 0.7);
  EXPECT_EQ(g(-1.0), 0.2);
  EXPECT_THROW(ResponseFunction::hardmax_random(0.5), std::invalid_argument);
  EXPECT_THROW(ResponseFunction::hardmax_random(0.0), std::invalid_argument);
  EXPECT_THROW(ResponseFunction::hardmax_random(0.2, 0.7, 0.9), std::invalid_argument);
}

TEST(Response, SoftMaxShapeAndConstants) {
  const auto f = ResponseFunction::softmax(0.1, 4);
  EXPECT_DOUBLE_EQ(f.delta0(), 0.25);
  EXPECT_DOUBLE_EQ(f(0.0), 0.5);
  EXPECT_NEAR(f(1.0), 0.1 + 0.8 / (1 + std::exp(-4.0)), 1e-15);
  EXPECT_DOUBLE_EQ(f.c0_prime(), 4 * 0.8 / 4);
  const double s = 1 / (1 + std::exp(-1.0));
  EXPECT_NEAR(f.c0(), 0.8 * 4 * s * (1 - s), 1e-15);
  EXPECT_EQ(ResponseFunction::softmax(0.1, 0.5).delta0(), 1.0);
  EXPECT_THROW(ResponseFunction::softmax(0.1, 4, 1.5), std::invalid_argument);
  EXPECT_THROW(ResponseFunction::softmax(0.1, -1), std::invalid_argument);

  double prev = -1;
  for (int i = -1000; i <= 1000; ++i) {
    const double v = f(i / 1000.0);
    EXPECT_GE(v, prev);
    EXPECT_GE(v, 0.1);
    EXPECT_LE(v, 0.9);
    prev = v;
  }
  // Lipschitz with c0'
  for (int i = -999; i < 1000; ++i) {
    const double a = i / 1000.0, b = a + 1e-3;
    EXPECT_LE(f(b) - f(a), f.c0_prime() * 1e-3 + 1e-15);
  }
}

TEST(Response, UniformIsFlat) {
  const auto f = ResponseFunction::uniform();
  for (double x : {-1.0, -0.2, 0.0, 0.4, 1.0}) EXPECT_EQ(f(x), 0.5);
}

TEST(Classify, Families) {
  auto c = classify([](double x) { return 0.1 + 0.8 / (1 + std::exp(-4 * x)); }, 0.25);
  EXPECT_EQ(c.regime, Regime::SoftMax);
  EXPECT_NEAR(c.eps0, 0.1 + 0.8 / (1 + std::exp(4.0)), 1e-12);
  EXPECT_NEAR(c.c0_prime, 0.8, 1e-6);

  c = classify([](double x) { return x > 0 ? 0.8 : (x < 0 ? 0.2 : 0.5); });
  EXPECT_EQ(c.regime, Regime::HardMaxRandom);
  EXPECT_DOUBLE_EQ(c.eps0, 0.2);

  c = classify([](double x) { return x > 0 ? 1.0 : (x < 0 ? 0.0 : 0.5); });
  EXPECT_EQ(c.regime, Regime::HardMax);

  EXPECT_EQ(classify([](double) { return 0.5; }).regime, Regime::Uniform);
  EXPECT_THROW(classify([](double x) { return 0.5 - 0.3 * x; }), std::domain_error);
  EXPECT_THROW(classify([](double x) { return 0.5 + 0.4 * std::sin(6 * x); }), std::domain_error);
}

TEST(Classify, BuiltinsAgreeWithTheirDeclaredRegime) {
  for (const auto& f : {ResponseFunction::hardmax(), ResponseFunction::hardmax_random(0.2),
                        ResponseFunction::softmax(0.1, 4), ResponseFunction::softmax(0.3, 20),
                        ResponseFunction::uniform()}) {
    const auto c = classify(f);
    EXPECT_EQ(c.regime, f.regime()) << f.label();
    if (f.regime() == Regime::SoftMax) {
      EXPECT_EQ(c.c0, f.c0());
      EXPECT_LE(c.c0, c.c0_prime);
    }
  }
}

TEST(Symmetry, Examples) {
  EXPECT_TRUE(is_symmetric(ResponseFunction::hardmax(0.5)));
  EXPECT_FALSE(is_symmetric(ResponseFunction::hardmax(1.0)));
  EXPECT_TRUE(is_symmetric(ResponseFunction::hardmax_random(0.2)));
  EXPECT_FALSE(is_symmetric(ResponseFunction::hardmax_random(0.1, 0.8, 0.5)));
  EXPECT_TRUE(is_symmetric(ResponseFunction::softmax(0.1, 4)));
  EXPECT_TRUE(is_symmetric(ResponseFunction::uniform()));
}

TEST(Response, PlateausAreExact) {
  const auto f = ResponseFunction::hardmax_random(0.1);
  for (int i = 1; i <= 1000; ++i) {
    EXPECT_EQ(f(i / 1000.0), 0.9);
    EXPECT_EQ(f(-i / 1000.0), 0.1);
  }
}

TEST(Response, JsonRoundTrip) {
  for (const auto& f : {ResponseFunction::hardmax(0.6), ResponseFunction::hardmax_random(0.2),
                        ResponseFunction::hardmax_random(0.1, 0.7, 0.4), ResponseFunction::softmax(0.1, 4),
                        ResponseFunction::uniform()}) {
    const auto g = ResponseFunction::from_json(f.to_json());
    EXPECT_EQ(g.to_json(), f.to_json());
    for (double x : {-1.0, -0.3, 0.0, 0.01, 0.7}) EXPECT_EQ(g(x), f(x));
  }
  EXPECT_THROW(ResponseFunction::from_json({{"regime", "hardmax"}, {"slope", 2}}), std::invalid_argument);
  EXPECT_THROW(ResponseFunction::from_json({{"regime", "argmax"}}), std::invalid_argument);
  EXPECT_EQ(regime_name(Regime::HardMaxRandom), "hardmax_random");
}
