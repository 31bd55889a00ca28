#include "duel/algorithm_spec.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace duel {

namespace {

void reject_unknown(const nlohmann::json& doc, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : doc.items()) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("algorithm spec: unknown field '" + key + "'");
  }
}

std::string format_double(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

AlgorithmSpec AlgorithmSpec::dynamic_greedy() { return {}; }

AlgorithmSpec AlgorithmSpec::static_greedy() {
  AlgorithmSpec s;
  s.kind = Kind::StaticGreedy;
  return s;
}

AlgorithmSpec AlgorithmSpec::explore_then_exploit(int m) {
  if (m < 1) throw std::invalid_argument("ExploreThenExploit: m must be at least 1");
  AlgorithmSpec s;
  s.kind = Kind::ExploreThenExploit;
  s.m = m;
  return s;
}

AlgorithmSpec AlgorithmSpec::explore_then_exploit_two_thirds() {
  AlgorithmSpec s;
  s.kind = Kind::ExploreThenExploit;
  s.m_two_thirds = true;
  return s;
}

AlgorithmSpec AlgorithmSpec::phased(std::string schedule) {
  if (schedule != "sqrt" && schedule != "doubling")
    throw std::invalid_argument("PhasedEE: schedule must be 'sqrt' or 'doubling'");
  AlgorithmSpec s;
  s.kind = Kind::PhasedEE;
  s.schedule = std::move(schedule);
  return s;
}

AlgorithmSpec AlgorithmSpec::succ_elim_reset(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("SuccElimReset: delta must lie in (0,1)");
  AlgorithmSpec s;
  s.kind = Kind::SuccElimReset;
  s.delta = delta;
  return s;
}

AlgorithmSpec AlgorithmSpec::mixed_greedy(AlgorithmSpec base, double p, int n0) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("MixedGreedy: p must lie in [0,1]");
  if (n0 < 1) throw std::invalid_argument("MixedGreedy: n0 must be at least 1");
  AlgorithmSpec s;
  s.kind = Kind::MixedGreedy;
  s.p = p;
  s.n0 = n0;
  s.base = std::make_shared<const AlgorithmSpec>(std::move(base));
  return s;
}

AlgorithmSpec AlgorithmSpec::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("name"))
    throw std::invalid_argument("algorithm spec: expected an object with a 'name'");
  const auto name = doc.at("name").get<std::string>();
  if (name == "DynamicGreedy") {
    reject_unknown(doc, {"name"});
    return dynamic_greedy();
  }
  if (name == "StaticGreedy") {
    reject_unknown(doc, {"name"});
    return static_greedy();
  }
  if (name == "ExploreThenExploit") {
    reject_unknown(doc, {"name", "m"});
    const auto& m = doc.at("m");
    if (m.is_string()) {
      if (m.get<std::string>() != "T^2/3")
        throw std::invalid_argument("ExploreThenExploit: m must be an integer or \"T^2/3\"");
      return explore_then_exploit_two_thirds();
    }
    return explore_then_exploit(m.get<int>());
  }
  if (name == "PhasedEE") {
    reject_unknown(doc, {"name", "schedule"});
    return phased(doc.at("schedule").get<std::string>());
  }
  if (name == "SuccElimReset") {
    reject_unknown(doc, {"name", "delta"});
    return succ_elim_reset(doc.value("delta", 0.1));
  }
  if (name == "MixedGreedy") {
    reject_unknown(doc, {"name", "base", "p", "n0"});
    return mixed_greedy(from_json(doc.at("base")), doc.at("p").get<double>(), doc.at("n0").get<int>());
  }
  throw std::invalid_argument("algorithm spec: unknown algorithm '" + name + "'");
}

nlohmann::json AlgorithmSpec::to_json() const {
  switch (kind) {
    case Kind::DynamicGreedy:
      return {{"name", "DynamicGreedy"}};
    case Kind::StaticGreedy:
      return {{"name", "StaticGreedy"}};
    case Kind::ExploreThenExploit:
      if (m_two_thirds) return {{"name", "ExploreThenExploit"}, {"m", "T^2/3"}};
      return {{"name", "ExploreThenExploit"}, {"m", m}};
    case Kind::PhasedEE:
      return {{"name", "PhasedEE"}, {"schedule", schedule}};
    case Kind::SuccElimReset:
      return {{"name", "SuccElimReset"}, {"delta", delta}};
    case Kind::MixedGreedy:
      return {{"name", "MixedGreedy"}, {"base", base->to_json()}, {"p", p}, {"n0", n0}};
  }
  return {};
}

std::string AlgorithmSpec::label() const {
  switch (kind) {
    case Kind::DynamicGreedy:
      return "DG";
    case Kind::StaticGreedy:
      return "SG";
    case Kind::ExploreThenExploit:
      return m_two_thirds ? "ETE(T^2/3)" : "ETE(" + std::to_string(m) + ")";
    case Kind::PhasedEE:
      return "PEE(" + schedule + ")";
    case Kind::SuccElimReset:
      return "SER(" + format_double(delta) + ")";
    case Kind::MixedGreedy:
      return "Mixed(" + base->label() + ",p=" + format_double(p) + ",n0=" + std::to_string(n0) + ")";
  }
  return "?";
}

bool AlgorithmSpec::is_anytime() const {
  switch (kind) {
    case Kind::ExploreThenExploit:
    case Kind::SuccElimReset:
      return false;
    case Kind::MixedGreedy:
      return base->is_anytime();
    default:
      return true;
  }
}

int AlgorithmSpec::resolved_m(int horizon) const {
  if (!m_two_thirds) return m;
  // Largest m with m^3 <= T^2.
  auto m3 = static_cast<long long>(std::cbrt(static_cast<double>(horizon) * horizon));
  const long long t2 = static_cast<long long>(horizon) * horizon;
  while ((m3 + 1) * (m3 + 1) * (m3 + 1) <= t2) ++m3;
  while (m3 > 0 && m3 * m3 * m3 > t2) --m3;
  return static_cast<int>(std::max(1LL, m3));
}

std::unique_ptr<BanditAlgorithm> make_algorithm(const AlgorithmSpec& spec, const PriorSpec& prior,
                                                int horizon, std::uint64_t seed) {
  const std::size_t k = prior.num_arms();
  switch (spec.kind) {
    case AlgorithmSpec::Kind::DynamicGreedy:
      return std::make_unique<DynamicGreedy>(prior, seed);
    case AlgorithmSpec::Kind::StaticGreedy:
      return std::make_unique<StaticGreedy>(k, seed);
    case AlgorithmSpec::Kind::ExploreThenExploit:
      return std::make_unique<ExploreThenExploit>(k, spec.resolved_m(horizon), horizon, seed);
    case AlgorithmSpec::Kind::PhasedEE:
      return std::make_unique<PhasedExploreExploit>(k, named_schedule(spec.schedule, k), spec.schedule,
                                                    horizon, seed);
    case AlgorithmSpec::Kind::SuccElimReset:
      return std::make_unique<SuccessiveEliminationReset>(k, horizon, spec.delta, seed);
    case AlgorithmSpec::Kind::MixedGreedy:
      // The base shares the wrapper's stream; its own seed is never drawn from.
      return std::make_unique<MixedGreedy>(make_algorithm(*spec.base, prior, horizon, seed), prior,
                                           spec.p, spec.n0, seed);
  }
  throw std::logic_error("make_algorithm: unhandled kind");
}

}  // namespace duel
