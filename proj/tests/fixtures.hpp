#pragma once

// Shared fixtures and a small brute-force reference used to check the
// library's enumeration code independently.

#include <cmath>
#include <functional>
#include <vector>

#include "duel/catalog.hpp"
#include "duel/prior.hpp"

namespace fx {

inline duel::PriorSpec oracle_prior() { return duel::oracle_instance(); }

inline duel::PriorSpec flat_beta() {
  return duel::PriorSpec({duel::ArmPrior::beta(1.001, 1.0), duel::ArmPrior::beta(1.0, 1.0)});
}

struct FiniteArm {
  std::vector<double> v, p;
};

// Posterior mean of a finite arm after s successes and f failures, by
// direct Bayes rule.
inline double post_mean(const FiniteArm& a, int s, int f) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    const double w = a.p[i] * std::pow(a.v[i], s) * std::pow(1 - a.v[i], f);
    num += w * a.v[i];
    den += w;
  }
  return num / den;
}

// Plain recursion over mu and every reward sequence for a deterministic
// index policy: choose(s, f) -> arm. Returns rew(1..n_max).
inline std::vector<double> brute_rew(const std::vector<FiniteArm>& arms, int n_max,
                                     const std::function<int(const std::vector<int>&, const std::vector<int>&)>& choose) {
  const std::size_t k = arms.size();
  std::vector<double> rew(n_max, 0.0);
  std::vector<std::size_t> idx(k, 0);
  std::function<void(std::size_t)> over_mu = [&](std::size_t a) {
    if (a < k) {
      for (idx[a] = 0; idx[a] < arms[a].v.size(); ++idx[a]) over_mu(a + 1);
      return;
    }
    double w0 = 1;
    std::vector<double> mu(k);
    for (std::size_t b = 0; b < k; ++b) {
      w0 *= arms[b].p[idx[b]];
      mu[b] = arms[b].v[idx[b]];
    }
    std::vector<int> s(k, 0), f(k, 0);
    std::function<void(int, double)> walk = [&](int n, double w) {
      if (n > n_max) return;
      const int arm = choose(s, f);
      rew[n - 1] += w * mu[arm];
      ++s[arm];
      walk(n + 1, w * mu[arm]);
      --s[arm];
      ++f[arm];
      walk(n + 1, w * (1 - mu[arm]));
      --f[arm];
    };
    walk(1, w0);
  };
  over_mu(0);
  return rew;
}

inline std::vector<FiniteArm> arms_of(const duel::PriorSpec& spec) {
  std::vector<FiniteArm> out;
  for (const auto& a : spec.arms()) out.push_back({a.support(), a.probs()});
  return out;
}

inline std::vector<double> brute_dg(const duel::PriorSpec& spec, int n_max) {
  const auto arms = arms_of(spec);
  return brute_rew(arms, n_max, [&](const std::vector<int>& s, const std::vector<int>& f) {
    int best = 0;
    double bm = post_mean(arms[0], s[0], f[0]);
    for (std::size_t a = 1; a < arms.size(); ++a) {
      const double m = post_mean(arms[a], s[a], f[a]);
      if (m > bm) {
        bm = m;
        best = static_cast<int>(a);
      }
    }
    return best;
  });
}

inline double brute_expected_max(const duel::PriorSpec& spec) {
  const auto arms = arms_of(spec);
  double total = 0;
  std::vector<std::size_t> idx(arms.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t a) {
    if (a < arms.size()) {
      for (idx[a] = 0; idx[a] < arms[a].v.size(); ++idx[a]) rec(a + 1);
      return;
    }
    double w = 1, mx = 0;
    for (std::size_t b = 0; b < arms.size(); ++b) {
      w *= arms[b].p[idx[b]];
      mx = std::max(mx, arms[b].v[idx[b]]);
    }
    total += w * mx;
  };
  rec(0);
  return total;
}

}  // namespace fx
