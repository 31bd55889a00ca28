#include "duel/oracle.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "duel/format.hpp"

namespace duel {

namespace {

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

struct Node {
  Kahan weight;
  std::vector<int> succ;
  std::vector<int> fail;
  std::unique_ptr<BanditAlgorithm> alg;
};

using Level = std::map<std::vector<std::int64_t>, Node>;

std::vector<std::int64_t> make_key(const std::vector<int>& succ, const std::vector<int>& fail,
                                   const BanditAlgorithm& alg) {
  std::vector<std::int64_t> key;
  for (std::size_t a = 0; a < succ.size(); ++a) {
    key.push_back(succ[a]);
    key.push_back(fail[a]);
  }
  alg.state_key(key);
  return key;
}

void check_budget(const PriorSpec& prior, int n_max) {
  if (!prior.all_finite()) throw std::invalid_argument("oracle: finite-support priors only");
  double size = std::pow(2.0, n_max);
  for (const auto& arm : prior.arms()) size *= static_cast<double>(arm.support().size());
  if (size > kOracleBudget)
    throw std::invalid_argument("oracle: enumeration size " + format_double(size) + " exceeds 1e7");
}

}  // namespace

void ExactProfile::write_csv(std::ostream& os) const {
  os << "n,rew,bir\n";
  for (int n = 1; n <= n_max; ++n)
    os << n << ',' << format_double(rew[n - 1]) << ',' << format_double(bir[n - 1]) << '\n';
}

ExactProfile exact_rew(const AlgorithmSpec& spec, const PriorSpec& prior, int n_max, int horizon) {
  if (n_max < 1) throw std::invalid_argument("oracle: n_max must be at least 1");
  check_budget(prior, n_max);
  const std::size_t k = prior.num_arms();

  ExactProfile out;
  out.algorithm = spec.label();
  out.n_max = n_max;
  out.benchmark = prior.expected_max();
  out.rew.resize(n_max);
  out.bir.resize(n_max);
  out.greedy_rew.resize(n_max);

  Level level;
  {
    Node root;
    root.weight.add(1.0);
    root.succ.assign(k, 0);
    root.fail.assign(k, 0);
    root.alg = make_algorithm(spec, prior, horizon > 0 ? horizon : n_max, 0);
    auto key = make_key(root.succ, root.fail, *root.alg);
    level.emplace(std::move(key), std::move(root));
  }

  std::vector<Branch> branches;
  std::vector<double> means(k);
  for (int n = 1; n <= n_max; ++n) {
    Kahan rew, greedy;
    Level next;
    out.peak_states = std::max(out.peak_states, level.size());
    for (auto& [key, node] : level) {
      const double w = node.weight.sum;
      double best = 0.0;
      for (ArmId a = 0; a < k; ++a) {
        means[a] = prior.arm(a).posterior_mean(node.succ[a], node.fail[a]);
        best = std::max(best, means[a]);
      }
      greedy.add(w * best);

      branches.clear();
      node.alg->branches(branches);
      for (const Branch& b : branches) {
        const double q = w * b.prob;
        const double p1 = means[b.arm];
        rew.add(q * p1);
        if (n == n_max) continue;
        for (int r = 0; r <= 1; ++r) {
          auto child = node.alg->clone();
          child->take(b);
          child->observe(b.arm, r);
          std::vector<int> succ = node.succ, fail = node.fail;
          (r ? succ : fail)[b.arm] += 1;
          auto ckey = make_key(succ, fail, *child);
          auto it = next.find(ckey);
          if (it == next.end()) {
            Node c;
            c.succ = std::move(succ);
            c.fail = std::move(fail);
            c.alg = std::move(child);
            it = next.emplace(std::move(ckey), std::move(c)).first;
          }
          it->second.weight.add(q * (r ? p1 : 1.0 - p1));
        }
      }
    }
    out.rew[n - 1] = rew.sum;
    out.bir[n - 1] = out.benchmark - rew.sum;
    out.greedy_rew[n - 1] = greedy.sum;
    if (static_cast<double>(next.size()) > kOracleBudget)
      throw std::runtime_error("oracle: live state count exceeds 1e7");
    level = std::move(next);
  }
  return out;
}

std::vector<double> mixed_greedy_rew(const ExactProfile& base, double p, int n0, int n_max) {
  if (n_max > base.n_max) throw std::invalid_argument("mixed_greedy_rew: base profile too short");
  std::vector<double> out(n_max);
  for (int n = 1; n <= n_max; ++n) {
    if (n < n0) {
      out[n - 1] = base.rew[n - 1];
      continue;
    }
    const int trials = n - n0;
    Kahan acc;
    for (int j = 0; j <= trials; ++j) {
      const double logw = std::lgamma(trials + 1.0) - std::lgamma(j + 1.0) - std::lgamma(trials - j + 1.0) +
                          (j > 0 ? j * std::log1p(-p) : 0.0) + (trials - j > 0 ? (trials - j) * std::log(p) : 0.0);
      const int m = n0 - 1 + j;  // completed base steps
      const double step = (1.0 - p) * base.rew[m] + p * base.greedy_rew[m];
      acc.add(std::exp(logw) * step);
    }
    out[n - 1] = acc.sum;
  }
  return out;
}

ExactGame exact_game(const AlgorithmSpec& alg1, const AlgorithmSpec& alg2, const PriorSpec& prior,
                     const ResponseFunction& f, int T) {
  if (T < 1 || T > kOracleMaxGameHorizon)
    throw std::invalid_argument("exact_game: T must lie in [1, 14]");
  ExactGame g;
  g.profile1 = exact_rew(alg1, prior, T, T);
  g.profile2 = exact_rew(alg2, prior, T, T);
  g.schedule = compute_schedule(g.profile1.rew, g.profile2.rew, f, T);
  return g;
}

}  // namespace duel
