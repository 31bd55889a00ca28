#include "duel/prior.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace duel {

namespace {

void check_finite_arm(const std::vector<double>& support, const std::vector<double>& probs) {
  if (support.empty()) throw std::invalid_argument("finite prior: empty support");
  if (support.size() != probs.size())
    throw std::invalid_argument("finite prior: support and probs differ in length");
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(support[i] > 0.0 && support[i] < 1.0))
      throw std::invalid_argument("finite prior: support values must lie strictly in (0,1)");
    if (i > 0 && !(support[i] > support[i - 1]))
      throw std::invalid_argument("finite prior: support must be strictly increasing");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("finite prior: probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("finite prior: probabilities must sum to 1");
}

Rational parse_rational(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  const auto s = v.get<std::string>();
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
    return Rational(boost::multiprecision::cpp_int(s.substr(0, slash)),
                    boost::multiprecision::cpp_int(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("prior: cannot parse ratio '" + s + "'");
  }
}

std::string format_rational(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                    const char* where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; }))
      throw std::invalid_argument(std::string(where) + ": unknown field '" + key + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------- ArmPrior

ArmPrior ArmPrior::finite(std::vector<double> support, std::vector<double> probs) {
  check_finite_arm(support, probs);
  ArmPrior a;
  a.kind_ = PriorKind::FiniteSupport;
  a.support_ = std::move(support);
  a.probs_ = std::move(probs);
  return a;
}

ArmPrior ArmPrior::finite_exact(std::vector<Rational> support, std::vector<Rational> probs) {
  if (std::accumulate(probs.begin(), probs.end(), Rational(0)) != 1)
    throw std::invalid_argument("finite prior: exact probabilities must sum to 1");
  std::vector<double> s, p;
  for (const auto& v : support) s.push_back(static_cast<double>(v));
  for (const auto& v : probs) p.push_back(static_cast<double>(v));
  ArmPrior a = finite(std::move(s), std::move(p));
  a.exact_support_ = std::move(support);
  a.exact_probs_ = std::move(probs);
  return a;
}

ArmPrior ArmPrior::beta(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw std::invalid_argument("beta prior: shape parameters must be positive");
  ArmPrior a;
  a.kind_ = PriorKind::BetaBernoulli;
  a.alpha_ = alpha;
  a.beta_ = beta;
  return a;
}

double ArmPrior::mean() const {
  if (kind_ == PriorKind::BetaBernoulli) return alpha_ / (alpha_ + beta_);
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) m += support_[i] * probs_[i];
  return m;
}

std::optional<Rational> ArmPrior::exact_mean() const {
  if (exact_support_.empty()) return std::nullopt;
  Rational m = 0;
  for (std::size_t i = 0; i < exact_support_.size(); ++i) m += exact_support_[i] * exact_probs_[i];
  return m;
}

double ArmPrior::posterior_mean(int successes, int failures) const {
  if (kind_ == PriorKind::BetaBernoulli)
    return (alpha_ + successes) / (alpha_ + beta_ + successes + failures);
  if (successes + failures <= 200) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
      const double w = probs_[i] * std::pow(support_[i], successes) * std::pow(1.0 - support_[i], failures);
      num += w * support_[i];
      den += w;
    }
    return num / den;
  }
  // Log-space weights keep long histories from underflowing.
  std::vector<double> logw(support_.size());
  double top = -INFINITY;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (probs_[i] <= 0.0) {
      logw[i] = -INFINITY;
      continue;
    }
    logw[i] = std::log(probs_[i]) + successes * std::log(support_[i]) +
              failures * std::log1p(-support_[i]);
    top = std::max(top, logw[i]);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const double w = std::exp(logw[i] - top);
    num += w * support_[i];
    den += w;
  }
  return num / den;
}

double ArmPrior::mass_below(double x) const {
  if (kind_ != PriorKind::FiniteSupport) throw std::logic_error("mass_below: finite support only");
  double m = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i)
    if (support_[i] < x) m += probs_[i];
  return m;
}

double ArmPrior::sample(Rng& rng) const {
  if (kind_ == PriorKind::BetaBernoulli) return rng.beta(alpha_, beta_);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    acc += probs_[i];
    if (u < acc) return support_[i];
  }
  // u landed in the rounding gap above the accumulated mass.
  for (std::size_t i = support_.size(); i-- > 0;)
    if (probs_[i] > 0.0) return support_[i];
  return support_.back();
}

// ---------------------------------------------------------------- PriorSpec

PriorSpec::PriorSpec(std::vector<ArmPrior> arms, Check check) : arms_(std::move(arms)) {
  if (arms_.empty()) throw std::invalid_argument("prior: at least one arm required");
  if (check == Check::Full) validate_full();
}

bool PriorSpec::all_finite() const {
  return std::all_of(arms_.begin(), arms_.end(), [](const ArmPrior& a) { return a.is_finite(); });
}

void PriorSpec::validate_full() const {
  for (std::size_t a = 0; a + 1 < arms_.size(); ++a) {
    for (std::size_t b = a + 1; b < arms_.size(); ++b) {
      const auto ea = arms_[a].exact_mean();
      const auto eb = arms_[b].exact_mean();
      if (ea && eb) {
        if (*ea == *eb) throw std::invalid_argument("prior: tied prior means (exact)");
        if (*ea < *eb) throw std::invalid_argument("prior: arms must be sorted by decreasing prior mean");
        continue;
      }
      const double ma = arms_[a].mean();
      const double mb = arms_[b].mean();
      if (std::abs(ma - mb) <= kDegeneracyTolerance)
        throw std::invalid_argument("prior: tied prior means");
      if (ma < mb) throw std::invalid_argument("prior: arms must be sorted by decreasing prior mean");
    }
  }
  // Every arm must be the strict best with positive probability. A Beta arm
  // always is; a finite arm needs a support point above some support point of
  // every other finite arm.
  for (std::size_t a = 0; a < arms_.size(); ++a) {
    if (!arms_[a].is_finite()) continue;
    bool possible = false;
    for (std::size_t i = 0; i < arms_[a].support().size() && !possible; ++i) {
      if (arms_[a].probs()[i] <= 0.0) continue;
      const double v = arms_[a].support()[i];
      bool beats_all = true;
      for (std::size_t b = 0; b < arms_.size(); ++b) {
        if (b == a || !arms_[b].is_finite()) continue;
        if (!(arms_[b].mass_below(v) > 0.0)) beats_all = false;
      }
      possible = beats_all;
    }
    if (!possible)
      throw std::invalid_argument("prior: arm " + std::to_string(a + 1) +
                                  " has zero probability of being the best arm");
  }
}

std::vector<double> PriorSpec::sample_instance(Rng& rng) const {
  std::vector<double> mu(arms_.size());
  for (std::size_t a = 0; a < arms_.size(); ++a) mu[a] = arms_[a].sample(rng);
  return mu;
}

double PriorSpec::expected_max() const {
  if (!all_finite()) throw std::logic_error("expected_max: exact value needs finite-support arms");
  std::set<double> values;
  for (const auto& arm : arms_) values.insert(arm.support().begin(), arm.support().end());
  // E[max] = sum_v v * (Pr[max <= v] - Pr[max < v]) over the value grid.
  double total = 0.0;
  double prev_cdf = 0.0;
  for (double v : values) {
    double cdf = 1.0;
    for (const auto& arm : arms_) {
      double m = 0.0;
      for (std::size_t i = 0; i < arm.support().size(); ++i)
        if (arm.support()[i] <= v) m += arm.probs()[i];
      cdf *= m;
    }
    total += v * (cdf - prev_cdf);
    prev_cdf = cdf;
  }
  return total;
}

double PriorSpec::prob_best(ArmId a) const {
  const auto& arm = arms_.at(a);
  if (!all_finite()) throw std::logic_error("prob_best: finite-support arms only");
  double total = 0.0;
  for (std::size_t i = 0; i < arm.support().size(); ++i) {
    double p = arm.probs()[i];
    for (std::size_t b = 0; b < arms_.size(); ++b)
      if (b != a) p *= arms_[b].mass_below(arm.support()[i]);
    total += p;
  }
  return total;
}

PosteriorState PriorSpec::initial_posterior() const { return PosteriorState(*this); }

nlohmann::json PriorSpec::to_json() const {
  nlohmann::json arms = nlohmann::json::array();
  for (const auto& arm : arms_) {
    if (arm.kind() == PriorKind::BetaBernoulli) {
      arms.push_back({{"kind", "beta"}, {"alpha", arm.alpha()}, {"beta", arm.beta()}});
    } else if (arm.exact_mean()) {
      // Exact arms round-trip as ratio strings.
      nlohmann::json s = nlohmann::json::array(), p = nlohmann::json::array();
      for (const auto& v : arm.exact_support()) s.push_back(format_rational(v));
      for (const auto& v : arm.exact_probs()) p.push_back(format_rational(v));
      arms.push_back({{"kind", "finite"}, {"support", s}, {"probs", p}});
    } else {
      arms.push_back({{"kind", "finite"}, {"support", arm.support()}, {"probs", arm.probs()}});
    }
  }
  return {{"arms", arms}};
}

PriorSpec PriorSpec::from_json(const nlohmann::json& doc, Check check) {
  if (!doc.is_object() || !doc.contains("arms") || !doc["arms"].is_array())
    throw std::invalid_argument("prior: expected an object with an 'arms' array");
  reject_unknown(doc, {"arms"}, "prior");
  std::vector<ArmPrior> arms;
  for (const auto& a : doc["arms"]) {
    const auto kind = a.at("kind").get<std::string>();
    if (kind == "beta") {
      reject_unknown(a, {"kind", "alpha", "beta"}, "beta arm");
      arms.push_back(ArmPrior::beta(a.at("alpha").get<double>(), a.at("beta").get<double>()));
    } else if (kind == "finite") {
      reject_unknown(a, {"kind", "support", "probs"}, "finite arm");
      const auto& s = a.at("support");
      const auto& p = a.at("probs");
      const auto is_ratio = [](const nlohmann::json& v) { return v.is_string(); };
      const bool exact = std::all_of(s.begin(), s.end(), is_ratio) &&
                         std::all_of(p.begin(), p.end(), is_ratio);
      if (exact) {
        std::vector<Rational> es, ep;
        for (const auto& v : s) es.push_back(parse_rational(v));
        for (const auto& v : p) ep.push_back(parse_rational(v));
        arms.push_back(ArmPrior::finite_exact(std::move(es), std::move(ep)));
      } else {
        arms.push_back(ArmPrior::finite(s.get<std::vector<double>>(), p.get<std::vector<double>>()));
      }
    } else {
      throw std::invalid_argument("prior: unknown arm kind '" + kind + "'");
    }
  }
  return PriorSpec(std::move(arms), check);
}

// ------------------------------------------------------------ PosteriorState

PosteriorState::PosteriorState(const PriorSpec& spec) {
  arms_.reserve(spec.num_arms());
  for (const auto& a : spec.arms()) {
    Arm s;
    s.kind = a.kind();
    s.support = a.support();
    s.probs = a.probs();
    s.alpha = a.alpha();
    s.beta = a.beta();
    s.mean = a.mean();
    arms_.push_back(std::move(s));
  }
}

void PosteriorState::update(ArmId arm, double reward) {
  if (reward != 0.0 && reward != 1.0)
    throw std::invalid_argument("posterior update: reward must be 0 or 1");
  auto& s = arms_.at(arm);
  const bool success = reward == 1.0;
  if (success)
    ++s.successes;
  else
    ++s.failures;
  if (s.kind == PriorKind::BetaBernoulli) {
    (success ? s.alpha : s.beta) += 1.0;
    s.mean = s.alpha / (s.alpha + s.beta);
    return;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < s.probs.size(); ++i) {
    s.probs[i] *= success ? s.support[i] : 1.0 - s.support[i];
    total += s.probs[i];
  }
  double m = 0.0;
  for (std::size_t i = 0; i < s.probs.size(); ++i) {
    s.probs[i] /= total;
    m += s.probs[i] * s.support[i];
  }
  s.mean = m;
}

ArmId PosteriorState::argmax_mean() const {
  ArmId best = 0;
  for (ArmId a = 1; a < arms_.size(); ++a)
    if (arms_[a].mean > arms_[best].mean) best = a;
  return best;
}

PosteriorState update_posterior(PosteriorState state, ArmId arm, double reward) {
  state.update(arm, reward);
  return state;
}

double posterior_mean(const PosteriorState& state, ArmId arm) { return state.mean(arm); }

std::vector<double> sample_instance(const PriorSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return spec.sample_instance(rng);
}

// ------------------------------------------------------------ perturbation

std::vector<double> sample_zero_sum_ball(std::size_t d, double radius, Rng& rng) {
  std::vector<double> q(d, 0.0);
  if (d < 2 || radius == 0.0) return q;
  double norm = 0.0;
  do {
    for (auto& x : q) x = rng.normal();
    const double mean = std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(d);
    for (auto& x : q) x -= mean;
    norm = std::sqrt(std::inner_product(q.begin(), q.end(), q.begin(), 0.0));
  } while (norm == 0.0);
  // The zero-sum hyperplane has dimension d-1.
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d - 1));
  for (auto& x : q) x *= r / norm;
  // Remove the residual rounding drift from the sum.
  const double drift = std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(d);
  for (auto& x : q) x -= drift;
  return q;
}

PerturbedPrior perturb_prior(const PriorSpec& spec, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("perturb_prior: epsilon must be non-negative");
  for (const auto& arm : spec.arms())
    if (!arm.is_finite())
      throw std::invalid_argument("perturb_prior: only finite-support arms can be perturbed");

  constexpr std::size_t kMaxAttempts = 10000;
  constexpr double kFloor = 1e-9;
  Rng rng(seed);
  std::size_t rejections = 0;
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<ArmPrior> arms;
    std::vector<std::vector<double>> noise;
    for (const auto& arm : spec.arms()) {
      const auto& p = arm.probs();
      std::vector<double> q;
      std::vector<double> out(p.size());
      for (std::size_t tries = 0;; ++tries) {
        if (tries == kMaxAttempts)
          throw std::invalid_argument("perturb_prior: epsilon too large to keep a valid distribution");
        q = sample_zero_sum_ball(p.size(), epsilon, rng);
        bool ok = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
          out[i] = p[i] + q[i];
          if (epsilon > 0.0 && p.size() > 1 && (out[i] < kFloor || out[i] > 1.0)) ok = false;
        }
        if (ok) break;
        ++rejections;
      }
      if (epsilon == 0.0 || p.size() < 2) {
        arms.push_back(arm);
      } else {
        arms.push_back(ArmPrior::finite(arm.support(), out));
      }
      noise.push_back(std::move(q));
    }
    try {
      return PerturbedPrior{PriorSpec(std::move(arms)), std::move(noise), rejections};
    } catch (const std::invalid_argument&) {
      ++rejections;  // perturbation broke ordering or possible-best; redraw
    }
  }
  throw std::invalid_argument("perturb_prior: could not restore a valid prior");
}

// ------------------------------------------------------------ degeneracy

namespace {

struct CountVector {
  std::vector<int> succ;
  std::vector<int> fail;
};

void enumerate_counts(std::size_t arms, int total, std::size_t pos, CountVector& cur,
                      const std::function<bool(const CountVector&)>& visit, bool& stop) {
  if (stop) return;
  if (pos == arms) {
    if (total == 0 && !visit(cur)) stop = true;
    return;
  }
  for (int s = 0; s <= total && !stop; ++s) {
    for (int f = 0; s + f <= total && !stop; ++f) {
      cur.succ[pos] = s;
      cur.fail[pos] = f;
      enumerate_counts(arms, total - s - f, pos + 1, cur, visit, stop);
    }
  }
}

}  // namespace

DegeneracyReport is_nondegenerate(const PriorSpec& spec, int horizon) {
  if (!spec.all_finite()) throw std::invalid_argument("is_nondegenerate: finite-support priors only");
  if (horizon < 0 || horizon > kMaxDegeneracyHorizon)
    throw std::invalid_argument("is_nondegenerate: horizon outside [0, 14]");
  const std::size_t k = spec.num_arms();
  DegeneracyReport report;
  CountVector cur{std::vector<int>(k, 0), std::vector<int>(k, 0)};
  // Support excludes 0 and 1, so every count vector is reachable by some
  // history; the means depend on the history only through the counts.
  for (int len = 0; len <= horizon && report.nondegenerate; ++len) {
    bool stop = false;
    enumerate_counts(k, len, 0, cur, [&](const CountVector& c) {
      std::vector<double> means(k);
      for (std::size_t a = 0; a < k; ++a) means[a] = spec.arm(a).posterior_mean(c.succ[a], c.fail[a]);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          if (std::abs(means[a] - means[b]) <= kDegeneracyTolerance) {
            report.nondegenerate = false;
            report.arm_a = a;
            report.arm_b = b;
            for (std::size_t x = 0; x < k; ++x) {
              for (int i = 0; i < c.succ[x]; ++i) report.witness.emplace_back(x, 1);
              for (int i = 0; i < c.fail[x]; ++i) report.witness.emplace_back(x, 0);
            }
            return false;
          }
        }
      }
      return true;
    }, stop);
  }
  return report;
}

}  // namespace duel
