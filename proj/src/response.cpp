#include "duel/response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace duel {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::HardMax:
      return "hardmax";
    case Regime::HardMaxRandom:
      return "hardmax_random";
    case Regime::SoftMax:
      return "softmax";
    case Regime::Uniform:
      return "uniform";
  }
  return "?";
}

ResponseFunction ResponseFunction::hardmax(double tie) {
  if (!(tie >= 0.0 && tie <= 1.0)) throw std::invalid_argument("hardmax: tie value must lie in [0,1]");
  ResponseFunction f;
  f.regime_ = Regime::HardMax;
  f.low_ = 0.0;
  f.high_ = 1.0;
  f.eps0_ = 0.0;
  f.tie_ = tie;
  return f;
}

ResponseFunction ResponseFunction::hardmax_random(double eps0, double tie) {
  if (!(eps0 > 0.0 && eps0 < 0.5)) throw std::invalid_argument("hardmax_random: eps0 must lie in (0, 1/2)");
  return hardmax_random(eps0, 1.0 - eps0, tie);
}

ResponseFunction ResponseFunction::hardmax_random(double low, double high, double tie) {
  if (!(low > 0.0 && low < 0.5) || !(high > 0.5 && high < 1.0))
    throw std::invalid_argument("hardmax_random: plateaus must satisfy 0 < low < 1/2 < high < 1");
  if (!(tie >= low && tie <= high))
    throw std::invalid_argument("hardmax_random: tie value must lie between the plateaus");
  ResponseFunction f;
  f.regime_ = Regime::HardMaxRandom;
  f.low_ = low;
  f.high_ = high;
  f.eps0_ = std::min(low, 1.0 - high);
  f.tie_ = tie;
  return f;
}

ResponseFunction ResponseFunction::softmax(double eps0, double slope, std::optional<double> delta0) {
  if (!(eps0 > 0.0 && eps0 < 0.5)) throw std::invalid_argument("softmax: eps0 must lie in (0, 1/2)");
  if (!(slope > 0.0) || !std::isfinite(slope)) throw std::invalid_argument("softmax: slope must be positive");
  const double d = delta0.value_or(std::min(1.0, 1.0 / slope));
  if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("softmax: delta0 must lie in (0,1]");
  ResponseFunction f;
  f.regime_ = Regime::SoftMax;
  f.eps0_ = eps0;
  f.low_ = eps0;
  f.high_ = 1.0 - eps0;
  f.slope_ = slope;
  f.delta0_ = d;
  f.tie_ = 0.5;
  return f;
}

ResponseFunction ResponseFunction::uniform() { return ResponseFunction(); }

double ResponseFunction::c0() const {
  if (regime_ != Regime::SoftMax) return 0.0;
  const double s = 1.0 / (1.0 + std::exp(-slope_ * delta0_));
  return (1.0 - 2.0 * eps0_) * slope_ * s * (1.0 - s);
}

double ResponseFunction::c0_prime() const {
  if (regime_ != Regime::SoftMax) return 0.0;
  return slope_ * (1.0 - 2.0 * eps0_) / 4.0;
}

double ResponseFunction::evaluate(double delta) const {
  if (!(delta >= -1.0 && delta <= 1.0))
    throw std::domain_error("response: delta outside [-1, 1]");
  if (std::abs(delta) < kTieTolerance) return tie_;
  switch (regime_) {
    case Regime::HardMax:
    case Regime::HardMaxRandom:
      return delta > 0.0 ? high_ : low_;
    case Regime::SoftMax:
      return eps0_ + (1.0 - 2.0 * eps0_) / (1.0 + std::exp(-slope_ * delta));
    case Regime::Uniform:
      return 0.5;
  }
  return 0.5;
}

nlohmann::json ResponseFunction::to_json() const {
  switch (regime_) {
    case Regime::HardMax:
      return {{"regime", "hardmax"}, {"tie", tie_}};
    case Regime::HardMaxRandom:
      if (low_ == 1.0 - high_) return {{"regime", "hardmax_random"}, {"eps0", eps0_}, {"tie", tie_}};
      return {{"regime", "hardmax_random"}, {"low", low_}, {"high", high_}, {"tie", tie_}};
    case Regime::SoftMax:
      return {{"regime", "softmax"}, {"eps0", eps0_}, {"slope", slope_}, {"delta0", delta0_}};
    case Regime::Uniform:
      return {{"regime", "uniform"}};
  }
  return {};
}

ResponseFunction ResponseFunction::from_json(const nlohmann::json& doc) {
  const auto regime = doc.at("regime").get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, _] : doc.items())
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        throw std::invalid_argument("response: unknown field '" + k + "'");
  };
  if (regime == "hardmax") {
    allow({"regime", "tie"});
    return hardmax(doc.value("tie", 0.5));
  }
  if (regime == "hardmax_random") {
    allow({"regime", "eps0", "low", "high", "tie"});
    if (doc.contains("low") || doc.contains("high"))
      return hardmax_random(doc.at("low").get<double>(), doc.at("high").get<double>(), doc.value("tie", 0.5));
    return hardmax_random(doc.at("eps0").get<double>(), doc.value("tie", 0.5));
  }
  if (regime == "softmax") {
    allow({"regime", "eps0", "slope", "delta0"});
    std::optional<double> d;
    if (doc.contains("delta0")) d = doc["delta0"].get<double>();
    return softmax(doc.at("eps0").get<double>(), doc.at("slope").get<double>(), d);
  }
  if (regime == "uniform") {
    allow({"regime"});
    return uniform();
  }
  throw std::invalid_argument("response: unknown regime '" + regime + "'");
}

std::string ResponseFunction::label() const {
  std::ostringstream os;
  switch (regime_) {
    case Regime::HardMax:
      os << "HardMax(tie=" << tie_ << ")";
      break;
    case Regime::HardMaxRandom:
      os << "HardMaxRandom(" << low_ << "," << high_ << ",tie=" << tie_ << ")";
      break;
    case Regime::SoftMax:
      os << "SoftMax(eps0=" << eps0_ << ",s=" << slope_ << ")";
      break;
    case Regime::Uniform:
      os << "Uniform";
      break;
  }
  return os.str();
}

// ------------------------------------------------------------ classification

namespace {

constexpr int kGridHalf = 10000;  // grid step 1e-4 on [-1, 1]
constexpr double kGridStep = 1e-4;
constexpr double kFlat = 1e-12;

double grid_x(int i) { return static_cast<double>(i) * kGridStep; }

}  // namespace

Classification classify(const std::function<double(double)>& f, double delta0) {
  std::vector<double> v(2 * kGridHalf + 1);
  for (int i = -kGridHalf; i <= kGridHalf; ++i) v[i + kGridHalf] = f(grid_x(i));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0 && v[i] <= 1.0)) throw std::domain_error("classify: value outside [0,1]");
    if (i > 0 && v[i] < v[i - 1] - kFlat)
      throw std::domain_error("classify: response is decreasing near x = " +
                              std::to_string(grid_x(static_cast<int>(i) - kGridHalf)));
  }

  Classification c;
  c.tie = v[kGridHalf];
  const auto [neg_lo, neg_hi] = std::minmax_element(v.begin(), v.begin() + kGridHalf);
  const auto [pos_lo, pos_hi] = std::minmax_element(v.begin() + kGridHalf + 1, v.end());
  c.low = v.front();
  c.high = v.back();

  if (*neg_hi - *neg_lo <= kFlat && *pos_hi - *pos_lo <= kFlat) {
    if (std::abs(c.low - 0.5) <= kFlat && std::abs(c.high - 0.5) <= kFlat && std::abs(c.tie - 0.5) <= kFlat) {
      c.regime = Regime::Uniform;
      c.eps0 = 0.5;
      return c;
    }
    if (!(c.low < 0.5 && c.high > 0.5)) throw std::domain_error("classify: step plateaus must straddle 1/2");
    c.eps0 = std::min(c.low, 1.0 - c.high);
    c.regime = (c.low == 0.0 && c.high == 1.0) ? Regime::HardMax : Regime::HardMaxRandom;
    return c;
  }

  c.eps0 = std::min(c.low, 1.0 - c.high);
  if (!(c.eps0 > 0.0)) throw std::domain_error("classify: smooth response must stay away from 0 and 1");
  if (!(v[kGridHalf - 1] < 0.5 && v[kGridHalf + 1] > 0.5))
    throw std::domain_error("classify: smooth response must cross 1/2 at 0");
  const int span = static_cast<int>(std::floor(delta0 / kGridStep + 1e-9));
  if (span < 1 || span >= kGridHalf) throw std::domain_error("classify: delta0 outside the grid");
  c.regime = Regime::SoftMax;
  c.delta0 = delta0;
  c.c0 = INFINITY;
  c.c0_prime = 0.0;
  for (int i = -span; i <= span; ++i) {
    const double d = (f(grid_x(i) + kGridStep) - f(grid_x(i) - kGridStep)) / (2.0 * kGridStep);
    c.c0 = std::min(c.c0, d);
    c.c0_prime = std::max(c.c0_prime, d);
  }
  if (!(c.c0 > 0.0)) throw std::domain_error("classify: smooth response is flat near 0");
  return c;
}

Classification classify(const ResponseFunction& f) {
  auto fn = [&f](double x) { return f.evaluate(std::clamp(x, -1.0, 1.0)); };
  Classification c = classify(fn, f.regime() == Regime::SoftMax ? f.delta0() : 0.1);
  if (c.regime != f.regime()) throw std::logic_error("classify: grid disagrees with the family's regime");
  if (f.regime() == Regime::SoftMax) {
    // The grid must stay inside the declared bounds; report the declared
    // constants, which the grid brackets up to difference error.
    if (c.low < f.eps0() || c.high > 1.0 - f.eps0()) throw std::logic_error("classify: softmax range check failed");
    const double tol = 1e-4 * f.c0_prime();
    if (c.c0 < f.c0() - tol || c.c0_prime > f.c0_prime() + tol)
      throw std::logic_error("classify: softmax derivative bounds failed");
    c.eps0 = f.eps0();
    c.c0 = f.c0();
    c.c0_prime = f.c0_prime();
  }
  return c;
}

bool is_symmetric(const std::function<double(double)>& f) {
  for (int i = 0; i <= 1000; ++i) {
    const double x = i * 1e-3;
    if (std::abs(f(x) + f(-x) - 1.0) > 1e-9) return false;
  }
  return true;
}

bool is_symmetric(const ResponseFunction& f) {
  return is_symmetric([&f](double x) { return f.evaluate(x); });
}

}  // namespace duel
