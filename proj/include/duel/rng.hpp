#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace duel {

/// Substream seeds are derived from a single 64-bit root:
///
///   derive_seed(root, label, index) =
///       splitmix64(root ^ splitmix64(fnv1a64(label) + index * 0x9E3779B97F4A7C15))
///
/// Labels name the consumer ("instance", "algorithm", "reward", ...) and the
/// index distinguishes replicates, arms, or principals. Nested derivations
/// compose by feeding a derived seed back in as the root.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  void reseed(std::uint64_t seed) { engine_.seed(seed); }

  // 53-bit uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t index(std::uint64_t n);

  double normal();
  double beta(double a, double b);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace duel
