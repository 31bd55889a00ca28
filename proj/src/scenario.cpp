#include "duel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "duel/format.hpp"
#include "duel/oracle.hpp"

namespace duel {

std::string kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Game:
      return "game";
    case ScenarioKind::Matrix:
      return "matrix";
    case ScenarioKind::RegimeSweep:
      return "regime-sweep";
    case ScenarioKind::Eps0Sweep:
      return "eps0-sweep";
  }
  return "?";
}

namespace {

ScenarioKind parse_kind(const std::string& s) {
  if (s == "game") return ScenarioKind::Game;
  if (s == "matrix") return ScenarioKind::Matrix;
  if (s == "regime-sweep") return ScenarioKind::RegimeSweep;
  if (s == "eps0-sweep") return ScenarioKind::Eps0Sweep;
  throw std::invalid_argument("scenario: unknown kind '" + s + "'");
}

std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) out[i] = digits[x & 15];
  return out;
}

struct Stat {
  double sum = 0.0, sumsq = 0.0;
  int n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double se() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sumsq - n * m * m) / (n - 1)) / n);
  }
};

// State shared by the checks of one game scenario.
struct CheckContext {
  const Scenario& s;
  std::vector<RegretProfile> profiles;
  std::vector<ExactProfile> exact;
  GameSchedule schedule;
  std::map<std::string, int> marks;
  std::optional<Stat> share1;
  nlohmann::json& summary;
};

std::optional<int> resolve_round(const nlohmann::json& v, const CheckContext& c, std::string& why) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    auto it = c.marks.find(v.get<std::string>());
    if (it == c.marks.end()) {
      why = "round '" + v.get<std::string>() + "' was not established by an earlier check";
      return std::nullopt;
    }
    return it->second;
  }
  if (v.is_array()) {
    int best = 1;
    for (const auto& x : v) {
      auto r = resolve_round(x, c, why);
      if (!r) return std::nullopt;
      best = std::max(best, *r);
    }
    return best;
  }
  why = "unrecognised round reference";
  return std::nullopt;
}

double plateau_value(const nlohmann::json& v, const ResponseFunction& f) {
  if (v.is_number()) return v.get<double>();
  const auto s = v.get<std::string>();
  if (s == "high") return f.high();
  if (s == "low") return f.low();
  if (s == "tie") return f.tie_value();
  throw std::invalid_argument("check: unknown plateau '" + s + "'");
}

AssertionResult run_check(const nlohmann::json& chk, CheckContext& c) {
  AssertionResult res;
  const auto type = chk.at("type").get<std::string>();
  res.name = chk.value("name", type);
  std::ostringstream detail;
  const int T = c.s.T;
  const ResponseFunction& f = c.s.response;

  if (type == "p_equals") {
    std::string why;
    const auto from = resolve_round(chk.value("from", nlohmann::json(1)), c, why);
    if (!from) {
      res.detail = why;
      return res;
    }
    const int to = chk.value("to", T);
    const int principal = chk.value("principal", 1);
    const double want = plateau_value(chk.at("value"), f);
    res.passed = *from <= to;
    int bad = 0;
    for (int t = *from; t <= to && t <= T; ++t) {
      const double p = principal == 1 ? c.schedule.p[t - 1] : 1.0 - c.schedule.p[t - 1];
      if (p != want) {
        res.passed = false;
        if (!bad) detail << "first mismatch at t=" << t << " p=" << format_double(p) << "; ";
        ++bad;
      }
    }
    detail << "principal " << principal << " p_t == " << format_double(want) << " for t in [" << *from << ","
           << to << "], mismatches " << bad;
  } else if (type == "dominance") {
    const bool strict = chk.value("mode", std::string("strict")) == "strict";
    const double eps0 = chk.value("eps0", f.eps0());
    const auto rep = check_bir_dominance(c.profiles.at(0), c.profiles.at(1), eps0,
                                         strict ? DominanceMode::Strict : DominanceMode::Weak,
                                         chk.value("alpha0", 0.0), chk.value("beta0", 0.0));
    auto j = rep.to_json();
    j.erase("margin");
    c.summary["dominance"] = j;
    res.passed = rep.n0.has_value();
    if (rep.n0) {
      c.marks[chk.value("mark", std::string("n0_dom"))] = *rep.n0;
      detail << "holds from n0=" << *rep.n0 << " through " << rep.margin.size();
    } else {
      detail << "inequality does not hold at the end of the profile";
    }
  } else if (type == "floor") {
    const bool random = chk.value("mode", std::string("random")) == "random";
    const double eps0 = chk.value("eps0", f.eps0());
    const double alpha0 = chk.value("alpha0", 1.0);
    const auto flags = check_floor(c.profiles.at(1), eps0, random ? FloorMode::RandomAssn : FloorMode::SoftmaxAssn,
                                   alpha0);
    const auto from = holds_from(flags);
    c.summary["floor_from"] = from ? nlohmann::json(*from) : nlohmann::json(nullptr);
    res.passed = from.has_value();
    if (from) {
      c.marks[chk.value("mark", std::string("n0_floor"))] = *from;
      detail << "floor holds from n=" << *from;
    } else {
      detail << "floor fails at the end of the profile";
    }
  } else if (type == "sudden_death") {
    try {
      const auto sd = sudden_death_check(c.schedule);
      if (!sd) {
        res.passed = !chk.contains("max_round");
        detail << "no strict leader";
      } else {
        c.summary["lock_round"] = sd->round;
        c.summary["lock_leader"] = sd->leader;
        c.marks[chk.value("mark", std::string("lock"))] = sd->round;
        res.passed = sd->round <= chk.value("max_round", T) && sd->leader == chk.value("leader", sd->leader);
        detail << "principal " << sd->leader << " leads from t=" << sd->round << " through T";
      }
    } catch (const SuddenDeathViolation& e) {
      detail << e.what();
    }
  } else if (type == "softmax_bump") {
    const double alpha0 = chk.at("alpha0").get<double>();
    const double c0 = f.c0();
    const auto& p2 = c.profiles.at(1);
    std::vector<bool> ok(T);
    for (int t = 1; t <= T; ++t) {
      const double lower = p2.bir_mean[t - 1] - 3.0 * p2.bir_se[t - 1];
      ok[t - 1] = c.schedule.p[t - 1] >= 0.5 + c0 * alpha0 / 4.0 * lower;
    }
    const auto t0 = holds_from(ok);
    c.summary["bump_t0"] = t0 ? nlohmann::json(*t0) : nlohmann::json(nullptr);
    int max_t0 = T;
    if (chk.contains("max_t0")) {
      std::string why;
      const auto r = resolve_round(chk["max_t0"], c, why);
      if (!r) {
        res.detail = why;
        return res;
      }
      max_t0 = *r;
    }
    res.passed = t0 && *t0 <= max_t0;
    if (t0) {
      c.marks[chk.value("mark", std::string("t0"))] = *t0;
      detail << "bound holds from t0=" << *t0 << " (limit " << max_t0 << ")";
    } else {
      detail << "bound fails at t=T";
    }
  } else if (type == "market_share") {
    if (!c.share1) {
      res.detail = "no traces were run";
      return res;
    }
    const double want = chk.at("value").get<double>();
    const double sig = chk.value("sigmas", 3.0);
    const double m = c.share1->mean(), se = c.share1->se();
    res.passed = std::abs(m - want) <= sig * se;
    detail << "share1 = " << format_double(m) << " +/- " << format_double(se) << ", expected "
           << format_double(want);
  } else if (type == "monotone") {
    const int principal = chk.value("principal", 1);
    const auto bad = audit_monotone(c.profiles.at(principal - 1));
    res.passed = bad.empty();
    detail << bad.size() << " monotonicity violations";
    if (!bad.empty()) detail << ", first at n=" << bad.front();
  } else if (type == "breg_diverging") {
    const int principal = chk.value("principal", 2);
    res.passed = breg_diverging(c.profiles.at(principal - 1));
    detail << "BReg(T) - BReg(T/2) = "
           << format_double(c.profiles.at(principal - 1).breg.back() -
                            c.profiles.at(principal - 1).breg[std::max(0, T / 2 - 1)]);
  } else if (type == "mixed_formula") {
    const int principal = chk.value("principal", 2);
    const AlgorithmSpec& spec = c.s.algorithms.at(principal - 1);
    if (spec.kind != AlgorithmSpec::Kind::MixedGreedy || c.exact.empty()) {
      res.detail = "needs an exact MixedGreedy profile";
      return res;
    }
    const auto base = exact_rew(*spec.base, c.s.prior, T, T);
    const auto formula = mixed_greedy_rew(base, spec.p, spec.n0, T);
    double worst = 0.0;
    for (int n = 1; n <= T; ++n)
      worst = std::max(worst, std::abs(formula[n - 1] - c.exact.at(principal - 1).rew[n - 1]));
    res.passed = worst <= 1e-12;
    detail << "max |enumeration - mixture formula| = " << format_double(worst);
  } else {
    throw std::invalid_argument("scenario: unknown check type '" + type + "'");
  }
  res.detail = detail.str();
  return res;
}

nlohmann::json profile_to_json(const RegretProfile& p) {
  return {{"algorithm", p.algorithm}, {"n_max", p.n_max},       {"replicates", p.replicates},
          {"seed", p.seed},           {"exact", p.exact},       {"benchmark", p.benchmark},
          {"benchmark_se", p.benchmark_se}, {"rew_mean", p.rew_mean}, {"rew_se", p.rew_se},
          {"bir_mean", p.bir_mean},   {"bir_se", p.bir_se},     {"breg", p.breg},
          {"breg_se", p.breg_se}};
}

RegretProfile profile_from_json(const nlohmann::json& j) {
  RegretProfile p;
  p.algorithm = j.at("algorithm").get<std::string>();
  p.n_max = j.at("n_max").get<int>();
  p.replicates = j.at("replicates").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.exact = j.at("exact").get<bool>();
  p.benchmark = j.at("benchmark").get<double>();
  p.benchmark_se = j.at("benchmark_se").get<double>();
  p.rew_mean = j.at("rew_mean").get<std::vector<double>>();
  p.rew_se = j.at("rew_se").get<std::vector<double>>();
  p.bir_mean = j.at("bir_mean").get<std::vector<double>>();
  p.bir_se = j.at("bir_se").get<std::vector<double>>();
  p.breg = j.at("breg").get<std::vector<double>>();
  p.breg_se = j.at("breg_se").get<std::vector<double>>();
  return p;
}

std::vector<RegretProfile> make_profiles(const Scenario& s, std::vector<ExactProfile>* exact) {
  std::vector<RegretProfile> out;
  for (const auto& alg : s.algorithms) {
    if (s.replicates == 0) {
      auto e = exact_rew(alg, s.prior, s.T, s.T);
      out.push_back(RegretProfile::from_exact(e));
      if (exact) exact->push_back(std::move(e));
    } else {
      ProfileOptions po;
      po.workers = s.workers;
      out.push_back(estimate_profile(alg, s.prior, s.T, s.replicates, derive_seed(s.seed, "profile"), po));
    }
  }
  return out;
}

PayoffOptions payoff_options(const Scenario& s) {
  PayoffOptions o;
  o.replicates = s.replicates == 0 ? 0 : std::max(2, s.traces);
  o.profile_replicates = s.replicates;
  o.workers = s.workers;
  o.allow_clamp = s.allow_clamp;
  return o;
}

}  // namespace

// ---------------------------------------------------------------- Scenario

nlohmann::json Scenario::to_json() const {
  nlohmann::json algs = nlohmann::json::array();
  for (const auto& a : algorithms) algs.push_back(a.to_json());
  return {{"name", name},
          {"description", description},
          {"kind", kind_name(kind)},
          {"prior", prior.to_json()},
          {"algorithms", algs},
          {"response", response.to_json()},
          {"T", T},
          {"utility", utility.to_json()},
          {"replicates", replicates},
          {"traces", traces},
          {"seed", seed},
          {"allow_clamp", allow_clamp},
          {"points", points},
          {"checks", checks}};
}

Scenario Scenario::from_json(const nlohmann::json& doc) {
  static const char* allowed[] = {"name",    "description", "kind",       "prior",  "algorithms", "response", "T",
                                  "utility", "replicates",  "traces",     "seed",   "allow_clamp", "points",  "checks",
                                  "workers"};
  for (const auto& [k, _] : doc.items())
    if (std::none_of(std::begin(allowed), std::end(allowed), [&](const char* a) { return k == a; }))
      throw std::invalid_argument("scenario: unknown field '" + k + "'");
  Scenario s;
  s.name = doc.at("name").get<std::string>();
  try {
    s.description = doc.value("description", std::string());
    s.kind = parse_kind(doc.value("kind", std::string("game")));
    s.prior = PriorSpec::from_json(doc.at("prior"));
    for (const auto& a : doc.at("algorithms")) s.algorithms.push_back(AlgorithmSpec::from_json(a));
    s.response = ResponseFunction::from_json(doc.at("response"));
    s.T = doc.at("T").get<int>();
    if (doc.contains("utility")) s.utility = UtilityFunction::from_json(doc["utility"]);
    s.replicates = doc.value("replicates", 0);
    s.traces = doc.value("traces", 0);
    if (!doc.contains("seed")) throw std::invalid_argument("seed is mandatory");
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.workers = doc.value("workers", 1u);
    s.allow_clamp = doc.value("allow_clamp", false);
    s.points = doc.value("points", nlohmann::json::array());
    s.checks = doc.value("checks", nlohmann::json::array());
  } catch (const std::exception& e) {
    throw std::invalid_argument("scenario '" + s.name + "': " + e.what());
  }
  if (s.T < 1) throw std::invalid_argument("scenario '" + s.name + "': T must be positive");
  const std::size_t need = s.kind == ScenarioKind::Matrix ? 1 : 2;
  if (s.algorithms.size() < need || (s.kind != ScenarioKind::Matrix && s.algorithms.size() != 2))
    throw std::invalid_argument("scenario '" + s.name + "': wrong number of algorithms");
  return s;
}

std::string Scenario::config_hash() const { return hex64(fnv1a64(to_json().dump())); }

// ------------------------------------------------------------ ResultBundle

bool ResultBundle::all_passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

nlohmann::json ResultBundle::to_json() const {
  nlohmann::json j = {{"scenario", scenario}, {"description", description}, {"kind", kind},
                      {"seed", seed},         {"version", version},         {"config_hash", config_hash},
                      {"config", config},     {"summary", summary}};
  if (schedule) {
    j["schedule"] = {{"horizon", schedule->horizon},
                     {"p", schedule->p},
                     {"pmr1", schedule->pmr1},
                     {"pmr2", schedule->pmr2},
                     {"clamped", schedule->clamped},
                     {"first_clamped_round", schedule->first_clamped_round},
                     {"max_mass_error", schedule->max_mass_error}};
  }
  nlohmann::json profs = nlohmann::json::array();
  for (const auto& p : profiles) profs.push_back(profile_to_json(p));
  j["profiles"] = profs;
  nlohmann::json as = nlohmann::json::array();
  for (const auto& a : assertions) as.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  j["assertions"] = as;
  j["passed"] = all_passed();
  return j;
}

ResultBundle ResultBundle::from_json(const nlohmann::json& j) {
  ResultBundle b;
  b.scenario = j.at("scenario").get<std::string>();
  b.description = j.at("description").get<std::string>();
  b.kind = j.at("kind").get<std::string>();
  b.seed = j.at("seed").get<std::uint64_t>();
  b.version = j.at("version").get<std::string>();
  b.config_hash = j.at("config_hash").get<std::string>();
  b.config = j.at("config");
  b.summary = j.at("summary");
  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    GameSchedule g;
    g.horizon = s.at("horizon").get<int>();
    g.p = s.at("p").get<std::vector<double>>();
    g.pmr1 = s.at("pmr1").get<std::vector<double>>();
    g.pmr2 = s.at("pmr2").get<std::vector<double>>();
    g.clamped = s.at("clamped").get<bool>();
    g.first_clamped_round = s.at("first_clamped_round").get<int>();
    g.max_mass_error = s.at("max_mass_error").get<double>();
    b.schedule = std::move(g);
  }
  for (const auto& p : j.at("profiles")) b.profiles.push_back(profile_from_json(p));
  for (const auto& a : j.at("assertions"))
    b.assertions.push_back({a.at("name").get<std::string>(), a.at("passed").get<bool>(),
                            a.at("detail").get<std::string>()});
  return b;
}

// ------------------------------------------------------------------ runs

namespace {

void run_game(const Scenario& s, ResultBundle& b) {
  std::vector<ExactProfile> exact;
  CheckContext c{s, make_profiles(s, &exact), {}, {}, {}, std::nullopt, b.summary};
  c.exact = std::move(exact);
  ScheduleOptions so;
  so.allow_clamp = s.allow_clamp;
  c.schedule = compute_schedule(c.profiles[0].rew_mean, c.profiles[1].rew_mean, s.response, s.T, so);

  auto& sm = b.summary;
  sm["exact_profiles"] = s.replicates == 0;
  sm["expected_share1"] = std::accumulate(c.schedule.p.begin(), c.schedule.p.end(), 0.0) / s.T;
  const auto [e1, e2] = expected_utility(c.schedule, s.utility);
  sm["schedule_utility1"] = e1;
  sm["schedule_utility2"] = e2;
  sm["clamped"] = c.schedule.clamped;

  if (s.traces > 0) {
    Stat share, u1, u2;
    for (int r = 0; r < s.traces; ++r) {
      const GameTrace tr = simulate(s.algorithms[0], s.algorithms[1], s.prior, c.schedule, s.utility,
                                    derive_seed(s.seed, "trace", static_cast<std::uint64_t>(r)));
      share.add(static_cast<double>(tr.n1) / s.T);
      u1.add(tr.utility1());
      u2.add(tr.utility2());
    }
    sm["traces"] = s.traces;
    sm["share1"] = share.mean();
    sm["share1_se"] = share.se();
    sm["utility1"] = u1.mean();
    sm["utility1_se"] = u1.se();
    sm["utility2"] = u2.mean();
    sm["utility2_se"] = u2.se();
    c.share1 = share;
  }

  for (const auto& chk : s.checks) b.assertions.push_back(run_check(chk, c));
  b.schedule = c.schedule;
  b.profiles = std::move(c.profiles);
}

void run_matrix(const Scenario& s, ResultBundle& b) {
  const auto profiles = make_profiles(s, nullptr);
  std::vector<std::vector<double>> rew;
  for (const auto& p : profiles) rew.push_back(p.rew_mean);
  const PayoffMatrix m = payoff_matrix_from_curves(s.algorithms, rew, s.prior, s.response, s.T, s.utility,
                                                   derive_seed(s.seed, "payoff"), payoff_options(s));
  b.summary["matrix"] = m.to_json();
  for (const auto& chk : s.checks) {
    const auto type = chk.at("type").get<std::string>();
    if (type != "equilibrium") throw std::invalid_argument("matrix scenario: unknown check '" + type + "'");
    AssertionResult r;
    r.name = chk.value("name", type);
    std::vector<std::pair<std::size_t, std::size_t>> want;
    for (const auto& cell : chk.at("cells")) want.emplace_back(cell.at(0).get<std::size_t>(), cell.at(1).get<std::size_t>());
    r.passed = m.equilibria == want;
    std::ostringstream d;
    d << "equilibria:";
    for (auto [i, j] : m.equilibria) d << " (" << m.labels[i] << "," << m.labels[j] << ")";
    r.detail = d.str();
    b.assertions.push_back(r);
  }
}

AssertionResult check_inverted_u(const nlohmann::json& chk, const nlohmann::json& table) {
  AssertionResult r;
  r.name = chk.value("name", std::string("inverted_u"));
  const double sig = chk.value("sigmas", 3.0);
  const double top_eps = chk.value("near_zero_at", 0.49);
  const double low_eps = chk.value("nonpositive_at", 0.01);
  const double small = chk.value("small", 0.0);
  bool near_zero = false, nonpos = false, interior = false;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i]["marginal"].get<double>() > table[argmax]["marginal"].get<double>()) argmax = i;
    const double e = table[i]["eps0"].get<double>();
    const double m = table[i]["marginal"].get<double>();
    const double se = table[i]["marginal_se"].get<double>();
    if (e == top_eps) near_zero = std::abs(m) <= sig * se;
    if (e == low_eps) nonpos = m <= sig * se + small;
  }
  interior = argmax > 0 && argmax + 1 < table.size();
  r.passed = near_zero && nonpos && interior;
  std::ostringstream d;
  d << "near-zero at " << top_eps << ": " << (near_zero ? "yes" : "no") << "; non-positive at " << low_eps << ": "
    << (nonpos ? "yes" : "no") << "; argmax eps0 = " << format_double(table[argmax]["eps0"].get<double>())
    << (interior ? " (interior)" : " (boundary)");
  r.detail = d.str();
  return r;
}

}  // namespace

nlohmann::json run_inverted_u(const Scenario& base, SweepAxis axis, const nlohmann::json& points) {
  if (base.algorithms.size() != 2) throw std::invalid_argument("inverted-U sweep: expects {better, base}");
  const auto profiles = make_profiles(base, nullptr);
  const std::vector<std::vector<double>> rew = {profiles[0].rew_mean, profiles[1].rew_mean};
  nlohmann::json table = nlohmann::json::array();

  if (axis == SweepAxis::Regime) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto f = ResponseFunction::from_json(points[k]);
      const PayoffMatrix m = payoff_matrix_from_curves(base.algorithms, rew, base.prior, f, base.T, base.utility,
                                                       derive_seed(base.seed, "regime", k), payoff_options(base));
      const bool better_eq = m.cells[0][0].equilibrium;
      const bool unique = m.equilibria.size() == 1 && better_eq;
      table.push_back({{"regime", regime_name(f.regime())},
                       {"response", f.to_json()},
                       {"better_is_equilibrium", better_eq},
                       {"better_unique", unique},
                       {"base_is_equilibrium", m.cells[1][1].equilibrium},
                       {"matrix", m.to_json()}});
    }
    return table;
  }

  if (!base.utility.is_market_share()) throw std::invalid_argument("eps0 sweep: market-share utility required");
  const int R = base.traces;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double eps0 = points[k].get<double>();
    const ResponseFunction f =
        eps0 >= 0.5 ? ResponseFunction::uniform() : ResponseFunction::hardmax_random(eps0);
    ScheduleOptions so;
    so.allow_clamp = base.allow_clamp;
    const GameSchedule dev = compute_schedule(rew[0], rew[1], f, base.T, so);
    const GameSchedule ref = compute_schedule(rew[1], rew[1], f, base.T, so);
    nlohmann::json row = {{"eps0", eps0}};
    if (R == 0) {
      const double a = expected_utility(dev, base.utility).first;
      const double b = expected_utility(ref, base.utility).first;
      row["u_better"] = a;
      row["u_base"] = b;
      row["marginal"] = a - b;
      row["marginal_se"] = 0.0;
      row["exact"] = true;
    } else {
      Stat a, b;
      const std::uint64_t point_seed = derive_seed(base.seed, "eps0-point", k);
      for (int r = 0; r < R; ++r) {
        a.add(simulate(base.algorithms[0], base.algorithms[1], base.prior, dev, base.utility,
                       derive_seed(point_seed, "better", r))
                  .utility1());
        b.add(simulate(base.algorithms[1], base.algorithms[1], base.prior, ref, base.utility,
                       derive_seed(point_seed, "base", r))
                  .utility1());
      }
      row["u_better"] = a.mean();
      row["u_better_se"] = a.se();
      row["u_base"] = b.mean();
      row["u_base_se"] = b.se();
      row["marginal"] = a.mean() - b.mean();
      row["marginal_se"] = std::hypot(a.se(), b.se());
    }
    table.push_back(row);
  }
  return table;
}

ResultBundle run_scenario(const Scenario& s) {
  ResultBundle b;
  b.scenario = s.name;
  b.description = s.description;
  b.kind = kind_name(s.kind);
  b.seed = s.seed;
  b.config = s.to_json();
  b.config_hash = s.config_hash();
  try {
    switch (s.kind) {
      case ScenarioKind::Game:
        run_game(s, b);
        break;
      case ScenarioKind::Matrix:
        run_matrix(s, b);
        break;
      case ScenarioKind::RegimeSweep:
      case ScenarioKind::Eps0Sweep: {
        const auto axis = s.kind == ScenarioKind::RegimeSweep ? SweepAxis::Regime : SweepAxis::Eps0;
        const auto table = run_inverted_u(s, axis, s.points);
        b.summary["sweep"] = table;
        for (const auto& chk : s.checks) {
          const auto type = chk.at("type").get<std::string>();
          if (type == "inverted_u") {
            b.assertions.push_back(check_inverted_u(chk, table));
          } else if (type == "regime_verdict") {
            AssertionResult r;
            r.name = chk.value("name", type);
            const auto want = chk.at("regime").get<std::string>();
            const bool expect = chk.at("better_is_equilibrium").get<bool>();
            r.detail = "regime " + want + " not in sweep";
            for (const auto& row : table) {
              if (row["regime"] != want) continue;
              const bool got = row["better_is_equilibrium"].get<bool>();
              r.passed = got == expect;
              r.detail = std::string("better algorithm ") + (got ? "is" : "is not") + " an equilibrium under " + want;
            }
            b.assertions.push_back(r);
          } else {
            throw std::invalid_argument("sweep scenario: unknown check '" + type + "'");
          }
        }
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("scenario '" + s.name + "': " + e.what());
  }
  return b;
}

}  // namespace duel
