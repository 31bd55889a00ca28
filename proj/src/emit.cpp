#include "duel/emit.hpp"

#include <fstream>
#include <stdexcept>

#include "duel/format.hpp"

namespace duel {

namespace fs = std::filesystem;

EmitFormat parse_format(const std::string& s) {
  if (s == "csv") return EmitFormat::Csv;
  if (s == "json") return EmitFormat::Json;
  throw std::invalid_argument("unknown format '" + s + "' (csv or json)");
}

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
  const auto key = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_json(v, key(k), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten_json(j[i], key(std::to_string(i)), out);
  } else if (j.is_number_float()) {
    out.emplace_back(prefix, format_double(j.get<double>()));
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

namespace {

std::ofstream open(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void finish(std::ofstream& os, const fs::path& p) {
  os.close();
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

std::vector<fs::path> emit(const ResultBundle& b, EmitFormat format, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> files;
  const std::string stem = b.scenario;

  if (format == EmitFormat::Json) {
    const auto p = dir / (stem + ".json");
    auto os = open(p);
    os << b.to_json().dump(2) << '\n';
    finish(os, p);
    files.push_back(p);
    return files;
  }

  {
    const auto p = dir / (stem + ".summary.csv");
    auto os = open(p);
    os << "key,value\n";
    std::vector<std::pair<std::string, std::string>> rows = {
        {"scenario", b.scenario},   {"description", b.description},
        {"kind", b.kind},           {"seed", std::to_string(b.seed)},
        {"version", b.version},     {"config_hash", b.config_hash},
        {"passed", b.all_passed() ? "true" : "false"}};
    flatten_json(b.summary, "", rows);
    for (const auto& [k, v] : rows) os << csv_field(k) << ',' << csv_field(v) << '\n';
    finish(os, p);
    files.push_back(p);
  }
  {
    const auto p = dir / (stem + ".assertions.csv");
    auto os = open(p);
    os << "scenario,assertion,passed,detail\n";
    for (const auto& a : b.assertions)
      os << csv_field(b.scenario) << ',' << csv_field(a.name) << ',' << (a.passed ? "true" : "false") << ','
         << csv_field(a.detail) << '\n';
    finish(os, p);
    files.push_back(p);
  }
  if (b.schedule) {
    const auto p = dir / (stem + ".schedule.csv");
    auto os = open(p);
    b.schedule->write_csv(os);
    finish(os, p);
    files.push_back(p);
  }
  for (std::size_t i = 0; i < b.profiles.size(); ++i) {
    const auto p = dir / (stem + ".profile" + std::to_string(i + 1) + ".csv");
    auto os = open(p);
    b.profiles[i].write_csv(os);
    finish(os, p);
    files.push_back(p);
  }
  return files;
}

}  // namespace duel
