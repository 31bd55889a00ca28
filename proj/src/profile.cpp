#include "duel/profile.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "duel/format.hpp"
#include "duel/oracle.hpp"

namespace duel {

namespace {

constexpr int kBlocks = 64;

// Mean and sum of squared deviations of a per-step series, Welford style.
struct Moments {
  long long count = 0;
  std::vector<double> mean, m2;

  explicit Moments(std::size_t n = 0) : mean(n, 0.0), m2(n, 0.0) {}

  void push_count() { ++count; }
  void add(std::size_t i, double x) {
    const double d = x - mean[i];
    mean[i] += d / static_cast<double>(count);
    m2[i] += d * (x - mean[i]);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(o.count), n = na + nb;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double d = o.mean[i] - mean[i];
      mean[i] += d * nb / n;
      m2[i] += o.m2[i] + d * d * na * nb / n;
    }
    count += o.count;
  }

  double se(std::size_t i) const {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    return std::sqrt(m2[i] / (n - 1.0) / n);
  }
};

struct Block {
  Moments rew, reg, creg, best;
  explicit Block(std::size_t n) : rew(n), reg(n), creg(n), best(1) {}
};

void run_block(const AlgorithmSpec& spec, const PriorSpec& prior, int n_max, int horizon, std::uint64_t seed,
               RewardModel model, int r_begin, int r_end, Block& out) {
  const std::size_t k = prior.num_arms();
  std::vector<Rng> tape(k);
  for (int r = r_begin; r < r_end; ++r) {
    Rng inst(derive_seed(seed, "instance", static_cast<std::uint64_t>(r)));
    const std::vector<double> mu = prior.sample_instance(inst);
    const double best = *std::max_element(mu.begin(), mu.end());
    auto alg = make_algorithm(spec, prior, horizon, derive_seed(seed, "algorithm", static_cast<std::uint64_t>(r)));
    alg->set_record_steps(false);
    const std::uint64_t reward_root = derive_seed(seed, "reward", static_cast<std::uint64_t>(r));
    for (ArmId a = 0; a < k; ++a) tape[a].reseed(derive_seed(reward_root, "arm", a));

    out.rew.push_count();
    out.reg.push_count();
    out.creg.push_count();
    out.best.push_count();
    out.best.add(0, best);
    double cum = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      const ArmId a = alg->next_arm();
      const double reward = model == RewardModel::Deterministic ? mu[a] : (tape[a].bernoulli(mu[a]) ? 1.0 : 0.0);
      alg->observe(a, reward);
      const double regret = best - mu[a];
      cum += regret;
      out.rew.add(n - 1, mu[a]);
      out.reg.add(n - 1, regret);
      out.creg.add(n - 1, cum);
    }
  }
}

struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

RegretProfile RegretProfile::from_exact(const ExactProfile& e) {
  RegretProfile p;
  p.algorithm = e.algorithm;
  p.n_max = e.n_max;
  p.exact = true;
  p.benchmark = e.benchmark;
  p.rew_mean = e.rew;
  p.bir_mean = e.bir;
  p.rew_se.assign(e.n_max, 0.0);
  p.bir_se.assign(e.n_max, 0.0);
  p.breg_se.assign(e.n_max, 0.0);
  KahanSum acc;
  for (double b : e.bir) {
    acc.add(b);
    p.breg.push_back(acc.sum);
  }
  return p;
}

RegretProfile RegretProfile::synthetic(std::vector<double> bir, std::vector<double> se) {
  RegretProfile p;
  p.algorithm = "synthetic";
  p.n_max = static_cast<int>(bir.size());
  p.exact = se.empty();
  p.benchmark = 1.0;
  if (se.empty()) se.assign(bir.size(), 0.0);
  if (se.size() != bir.size()) throw std::invalid_argument("synthetic profile: s.e. length mismatch");
  p.bir_se = se;
  p.rew_se = se;
  KahanSum acc;
  for (double b : bir) {
    p.rew_mean.push_back(1.0 - b);
    acc.add(b);
    p.breg.push_back(acc.sum);
  }
  p.breg_se.assign(bir.size(), 0.0);
  p.bir_mean = std::move(bir);
  return p;
}

void RegretProfile::write_csv(std::ostream& os) const {
  os << "n,rew_mean,rew_se,bir_mean,bir_se,breg\n";
  for (int n = 1; n <= n_max; ++n)
    os << n << ',' << format_double(rew_mean[n - 1]) << ',' << format_double(rew_se[n - 1]) << ','
       << format_double(bir_mean[n - 1]) << ',' << format_double(bir_se[n - 1]) << ','
       << format_double(breg[n - 1]) << '\n';
}

RegretProfile estimate_profile(const AlgorithmSpec& spec, const PriorSpec& prior, int n_max, int replicates,
                               std::uint64_t seed, ProfileOptions opts) {
  if (replicates < 2) throw std::invalid_argument("estimate_profile: at least 2 replicates required");
  if (n_max < 1) throw std::invalid_argument("estimate_profile: n_max must be positive");
  const int horizon = opts.horizon > 0 ? opts.horizon : n_max;
  // Fail early on bad parameters rather than inside a worker.
  make_algorithm(spec, prior, horizon, 0);

  const int blocks = std::min(kBlocks, replicates);
  std::vector<Block> results(blocks, Block(n_max));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int b = next++; b < blocks; b = next++) {
      const int lo = static_cast<int>(static_cast<long long>(replicates) * b / blocks);
      const int hi = static_cast<int>(static_cast<long long>(replicates) * (b + 1) / blocks);
      run_block(spec, prior, n_max, horizon, seed, opts.reward_model, lo, hi, results[b]);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, blocks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Block total(n_max);
  for (const auto& b : results) {
    total.rew.merge(b.rew);
    total.reg.merge(b.reg);
    total.creg.merge(b.creg);
    total.best.merge(b.best);
  }

  RegretProfile p;
  p.algorithm = spec.label();
  p.n_max = n_max;
  p.replicates = replicates;
  p.seed = seed;
  p.benchmark = total.best.mean[0];
  p.benchmark_se = total.best.se(0);
  p.rew_mean = total.rew.mean;
  p.bir_mean = total.reg.mean;
  p.breg = total.creg.mean;
  for (int i = 0; i < n_max; ++i) {
    p.rew_se.push_back(total.rew.se(i));
    p.bir_se.push_back(total.reg.se(i));
    p.breg_se.push_back(total.creg.se(i));
  }
  return p;
}

std::vector<int> audit_monotone(const RegretProfile& p, double abs_tol) {
  std::vector<int> bad;
  for (int n = 1; n < p.n_max; ++n) {
    const double se = std::hypot(p.bir_se[n - 1], p.bir_se[n]);
    if (p.bir_mean[n] > p.bir_mean[n - 1] + 3.0 * se + abs_tol) bad.push_back(n);
  }
  return bad;
}

RateFit fit_rate(const RegretProfile& p, int n_min, int n_max) {
  if (n_max == 0) n_max = p.n_max;
  if (n_min < 1 || n_max > p.n_max || n_max - n_min < 2)
    throw std::invalid_argument("fit_rate: fit range must hold at least three steps of the profile");
  std::vector<double> xs, ys;
  for (int n = n_min; n <= n_max; ++n) {
    const double b = p.bir_mean[n - 1];
    if (!(b > 0.0)) throw std::domain_error("fit_rate: non-positive BIR at n = " + std::to_string(n));
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(b));
  }
  const double m = static_cast<double>(xs.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) xbar += xs[i], ybar += ys[i];
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.gamma = -slope;
  fit.intercept = ybar - slope * xbar;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * xs[i]);
    sse += r * r;
  }
  fit.gamma_se = std::sqrt(sse / (m - 2.0) / sxx);
  fit.ci_low = fit.gamma - 1.96 * fit.gamma_se;
  fit.ci_high = fit.gamma + 1.96 * fit.gamma_se;
  fit.points = static_cast<int>(m);
  return fit;
}

double interpolate(const std::vector<double>& curve, double x) {
  if (curve.empty()) throw std::invalid_argument("interpolate: empty curve");
  const double hi = static_cast<double>(curve.size());
  x = std::clamp(x, 1.0, hi);
  const double fl = std::floor(x);
  const auto i = static_cast<std::size_t>(fl);
  if (fl == x || i >= curve.size()) return curve[i - 1];
  const double w = x - fl;
  return (1.0 - w) * curve[i - 1] + w * curve[i];
}

nlohmann::json DominanceReport::to_json() const {
  nlohmann::json j = {{"predicate", mode == DominanceMode::Strict ? "bir-dominance" : "weak-bir-dominance"},
                      {"eps0", eps0},
                      {"alpha0", alpha0},
                      {"beta0", beta0}};
  j["n0"] = n0 ? nlohmann::json(*n0) : nlohmann::json(nullptr);
  j["margin"] = margin;
  return j;
}

DominanceReport check_bir_dominance(const RegretProfile& p1, const RegretProfile& p2, double eps0,
                                    DominanceMode mode, double alpha0, double beta0) {
  DominanceReport rep;
  rep.mode = mode;
  rep.eps0 = eps0;
  rep.alpha0 = alpha0;
  rep.beta0 = beta0;
  const int n_max = std::min(p1.n_max, p2.n_max);
  const double thr = mode == DominanceMode::Strict ? 0.5 : 1.0 - alpha0;
  rep.margin.resize(n_max);
  std::vector<bool> ok(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const double x = mode == DominanceMode::Strict ? eps0 * n / 2.0 : (1.0 - beta0) * n;
    const double b1 = interpolate(p1.bir_mean, x) + 2.0 * interpolate(p1.bir_se, x);
    const double b2 = p2.bir_mean[n - 1] - 2.0 * p2.bir_se[n - 1];
    rep.margin[n - 1] = thr * b2 - b1;
    ok[n - 1] = b1 < thr * b2;
  }
  rep.n0 = holds_from(ok);
  return rep;
}

std::vector<bool> check_floor(const RegretProfile& p2, double eps0, FloorMode mode, double alpha0) {
  std::vector<bool> out(p2.n_max);
  for (int n = 1; n <= p2.n_max; ++n) {
    const double b = p2.bir_mean[n - 1] - 2.0 * p2.bir_se[n - 1];
    if (mode == FloorMode::RandomAssn) {
      out[n - 1] = b > 4.0 * std::exp(-eps0 * n / 12.0);
    } else {
      out[n - 1] = b >= (4.0 / alpha0) * std::exp(-std::min(eps0, 0.125) * n / 12.0);
    }
  }
  return out;
}

std::optional<int> holds_from(const std::vector<bool>& flags) {
  int n = static_cast<int>(flags.size());
  if (n == 0 || !flags.back()) return std::nullopt;
  while (n > 1 && flags[n - 2]) --n;
  return n;
}

bool breg_diverging(const RegretProfile& p) {
  const int hi = p.n_max, lo = std::max(1, p.n_max / 2);
  const double diff = p.breg[hi - 1] - p.breg[lo - 1];
  const double se = std::hypot(p.breg_se[hi - 1], p.breg_se[lo - 1]);
  return diff > 3.0 * se;
}

}  // namespace duel
