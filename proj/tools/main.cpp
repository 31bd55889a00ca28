#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "duel/catalog.hpp"
#include "duel/emit.hpp"
#include "duel/format.hpp"
#include "duel/oracle.hpp"
#include "duel/profile.hpp"
#include "duel/scenario.hpp"

using namespace duel;
namespace fs = std::filesystem;

namespace {

// Inline JSON, a path to a JSON file, or (for scenarios) a built-in name.
nlohmann::json load_json(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) return nlohmann::json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot open '" + arg + "'");
  return nlohmann::json::parse(in);
}

Scenario load_scenario(const std::string& arg) {
  if (auto s = find_builtin(arg)) return *s;
  if (!fs::exists(arg) && arg.find('{') == std::string::npos)
    throw std::runtime_error("'" + arg + "' is neither a built-in scenario nor a config file (try `duel list`)");
  return Scenario::from_json(load_json(arg));
}

void print_assertions(const ResultBundle& b) {
  for (const auto& a : b.assertions)
    std::cout << (a.passed ? "PASS " : "FAIL ") << b.scenario << ": " << a.name << " -- " << a.detail << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duel: competing bandit principals, schedules and scenarios"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string target, out = "results", format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates, traces;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  auto* run = app.add_subcommand("run", "run a built-in scenario or a JSON config");
  run->add_option("scenario", target, "built-in name or config path")->required();
  run->add_option("--seed", seed, "root seed");
  run->add_option("--out", out, "output directory");
  run->add_option("--replicates", replicates, "profile replicates (0 = exact oracle)");
  run->add_option("--traces", traces, "game traces / payoff replicates");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--workers", workers, "threads for profile estimation");

  auto* list = app.add_subcommand("list", "print the built-in catalog");

  std::string alg_arg, prior_arg;
  int n_max = 0, prof_reps = 0;
  auto* prof = app.add_subcommand("profile", "tabulate rew/BIR/BReg for one algorithm");
  prof->add_option("alg", alg_arg, "algorithm JSON or file")->required();
  prof->add_option("prior", prior_arg, "prior JSON or file")->required();
  prof->add_option("--n-max", n_max, "steps")->required()->check(CLI::PositiveNumber);
  prof->add_option("--replicates", prof_reps, "Monte-Carlo replicates; 0 enumerates exactly");
  prof->add_option("--seed", seed, "root seed");
  prof->add_option("--workers", workers, "threads");

  std::string axis = "eps0";
  std::vector<std::string> points;
  auto* sweep = app.add_subcommand("sweep", "inverted-U sweep over eps0 or response regimes");
  sweep->add_option("base", target, "base scenario (name or config)")->required();
  sweep->add_option("--axis", axis, "eps0 or regime")->check(CLI::IsMember({"eps0", "regime"}));
  sweep->add_option("--points", points, "comma-separated eps0 values")->delimiter(',');
  sweep->add_option("--seed", seed, "root seed");
  sweep->add_option("--replicates", replicates, "profile replicates (0 = exact oracle)");
  sweep->add_option("--traces", traces, "traces per point");
  sweep->add_option("--out", out, "output directory");
  sweep->add_option("--workers", workers, "threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& s : builtin_scenarios())
        std::cout << s.name << "  [" << kind_name(s.kind) << ", T=" << s.T
                  << (s.replicates ? ", R=" + std::to_string(s.replicates) : std::string(", exact")) << "]  "
                  << s.description << '\n';
      return 0;
    }

    if (prof->parsed()) {
      const auto alg = AlgorithmSpec::from_json(load_json(alg_arg));
      const auto prior = PriorSpec::from_json(load_json(prior_arg));
      RegretProfile p;
      if (prof_reps == 0) {
        p = RegretProfile::from_exact(exact_rew(alg, prior, n_max));
      } else {
        ProfileOptions po;
        po.workers = workers;
        p = estimate_profile(alg, prior, n_max, prof_reps, seed.value_or(kDefaultSeed), po);
      }
      p.write_csv(std::cout);
      return 0;
    }

    Scenario s = load_scenario(target);
    if (seed) s.seed = *seed;
    if (replicates) s.replicates = *replicates;
    if (traces) s.traces = *traces;
    s.workers = workers;

    if (sweep->parsed()) {
      s.kind = axis == "eps0" ? ScenarioKind::Eps0Sweep : ScenarioKind::RegimeSweep;
      if (!points.empty()) {
        s.points = nlohmann::json::array();
        for (const auto& p : points) {
          if (axis == "eps0")
            s.points.push_back(std::stod(p));
          else
            s.points.push_back(nlohmann::json::parse(p));
        }
      }
      const bool keep_checks = s.kind == find_builtin(target).value_or(s).kind;
      if (!keep_checks) s.checks = nlohmann::json::array();
      s.name += "." + axis + "-sweep";
      format = "csv";
    }

    const ResultBundle b = run_scenario(s);
    const auto files = emit(b, parse_format(format), out);
    print_assertions(b);
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
    if (b.kind == "eps0-sweep") {
      std::cout << "eps0,marginal,marginal_se\n";
      for (const auto& row : b.summary["sweep"])
        std::cout << format_double(row["eps0"].get<double>()) << ','
                  << format_double(row["marginal"].get<double>()) << ','
                  << format_double(row["marginal_se"].get<double>()) << '\n';
    }
    return b.all_passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
