#pragma once

#include <functional>
#include <optional>
#include <string>

#include "json.hpp"

namespace duel {

enum class Regime { HardMax, HardMaxRandom, SoftMax, Uniform };

std::string regime_name(Regime r);

/// |delta| below this is a tie and returns the tie value.
inline constexpr double kTieTolerance = 1e-12;

/// Probability that an agent picks principal 1 given PMR_1 - PMR_2.
class ResponseFunction {
 public:
  static ResponseFunction hardmax(double tie = 0.5);
  static ResponseFunction hardmax_random(double eps0, double tie = 0.5);
  /// Independent plateaus: f = low on [-1,0), high on (0,1].
  static ResponseFunction hardmax_random(double low, double high, double tie);
  /// f(x) = eps0 + (1 - 2 eps0) / (1 + exp(-slope x)). delta0 defaults to
  /// min(1, 1/slope).
  static ResponseFunction softmax(double eps0, double slope, std::optional<double> delta0 = std::nullopt);
  static ResponseFunction uniform();

  Regime regime() const { return regime_; }
  double tie_value() const { return tie_; }
  double low() const { return low_; }
  double high() const { return high_; }
  /// Baseline probability f(-1) for the symmetric families.
  double eps0() const { return eps0_; }
  double slope() const { return slope_; }

  /// SoftMax constants: c0 <= f'(x) <= c0' on [-delta0, delta0].
  double c0() const;
  double c0_prime() const;
  double delta0() const { return delta0_; }

  double evaluate(double delta) const;
  double operator()(double delta) const { return evaluate(delta); }

  nlohmann::json to_json() const;
  static ResponseFunction from_json(const nlohmann::json& doc);

  std::string label() const;

 private:
  ResponseFunction() = default;

  Regime regime_ = Regime::Uniform;
  double tie_ = 0.5;
  double low_ = 0.5;
  double high_ = 0.5;
  double eps0_ = 0.5;
  double slope_ = 0.0;
  double delta0_ = 0.0;
};

struct Classification {
  Regime regime = Regime::Uniform;
  double eps0 = 0.0;
  double tie = 0.5;
  double low = 0.0;
  double high = 1.0;
  // SoftMax only
  double c0 = 0.0;
  double c0_prime = 0.0;
  double delta0 = 0.0;
};

/// Grid classification of an arbitrary response on [-1,1]. Derivatives use
/// central differences with step 1e-4. Throws std::domain_error when f is
/// not non-decreasing or fits no regime.
Classification classify(const std::function<double(double)>& f, double delta0 = 0.1);

/// Same procedure applied to a built-in family, using its own delta0 and
/// checking the grid against the family's declared constants.
Classification classify(const ResponseFunction& f);

/// f(-x) + f(x) = 1 on a 1e-3 grid, tolerance 1e-9.
bool is_symmetric(const std::function<double(double)>& f);
bool is_symmetric(const ResponseFunction& f);

}  // namespace duel
