#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "tlsthermo/errors.hpp"
#include "tlsthermo/parameters.hpp"

namespace tlsthermo::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view text, int line, std::string_view key) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(line, "'" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view text, int line, std::string_view key) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError(line, "'" + std::string(key) + "' expects an integer, got '" + std::string(text) + "'");
  }
  return v;
}

// Numeric model keys accepted in a scenario file. Fixed occupations go
// through the *.occupation keys instead of reservoir_u.f and friends.
bool is_model_key(std::string_view key) {
  static const std::set<std::string, std::less<>> excluded = {"reservoir_u.f", "reservoir_l.f", "bath.n"};
  if (excluded.count(key)) return false;
  for (const auto& k : parameter_keys()) {
    if (k == key) return true;
  }
  return false;
}

const char* ordering_name(FermionOrdering o) { return o == FermionOrdering::LowerFirst ? "lower-first" : "upper-first"; }

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

OccupationSpec parse_occupation(std::string_view text) {
  if (text == "thermal-bare") return OccupationSpec::bare();
  if (text == "thermal-effective") return OccupationSpec::effective();
  if (text.substr(0, 6) == "fixed:") {
    const auto v = text.substr(6);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec == std::errc() && ptr == v.data() + v.size() && !v.empty()) return OccupationSpec::fixed(x);
  }
  throw ModelError("occupation must be fixed:<value>, thermal-bare or thermal-effective, got '" +
                   std::string(text) + "'");
}

std::string format_occupation(const OccupationSpec& occ) {
  if (occ.is_bare()) return "thermal-bare";
  if (occ.is_effective()) return "thermal-effective";
  return "fixed:" + format_number(std::get<OccupationSpec::Fixed>(occ.mode).value);
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  SystemSpec& s = cfg.spec;
  s.levels = {1.0, 0.0};
  s.drive = {1.0, {0.1, 0.0}};
  s.cavity = {1.0, {0.02, 0.0}, 12};
  s.upper = {0.1, OccupationSpec::effective(), 0.6, 0.1};
  s.lower = {0.1, OccupationSpec::effective(), 0.4, 0.1};
  s.bath = {0.1, OccupationSpec::effective(), 0.1};
  return cfg;
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg = default_scenario();
  std::map<std::string, int, std::less<>> seen;
  std::vector<std::tuple<std::string, double, int>> deferred;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(line_no, "duplicate key '" + std::string(key) + "' (first set on line " +
                                     std::to_string(it->second) + ")");
    }
    seen.emplace(std::string(key), line_no);

    try {
      if (key == "treatment") {
        if (value == "classical") cfg.treatment = Treatment::Classical;
        else if (value == "quantum") cfg.treatment = Treatment::Quantum;
        else throw ConfigError(line_no, "treatment must be classical or quantum");
      } else if (key == "reservoir_u.occupation") {
        cfg.spec.upper.occupation = parse_occupation(value);
      } else if (key == "reservoir_l.occupation") {
        cfg.spec.lower.occupation = parse_occupation(value);
      } else if (key == "bath.occupation") {
        cfg.spec.bath.occupation = parse_occupation(value);
      } else if (key == "solver.tolerance") {
        cfg.solver.tolerance = parse_double(value, line_no, key);
      } else if (key == "solver.t_final") {
        cfg.solver.t_final = parse_double(value, line_no, key);
      } else if (key == "solver.dt") {
        cfg.solver.dt = parse_double(value, line_no, key);
      } else if (key == "solver.record_every") {
        cfg.solver.record_every = parse_int(value, line_no, key);
      } else if (key == "solver.max_fock_cutoff") {
        cfg.solver.max_fock_cutoff = parse_int(value, line_no, key);
      } else if (key == "solver.ordering") {
        if (value == "lower-first") cfg.solver.ordering = FermionOrdering::LowerFirst;
        else if (value == "upper-first") cfg.solver.ordering = FermionOrdering::UpperFirst;
        else throw ConfigError(line_no, "solver.ordering must be lower-first or upper-first");
      } else if (key == "initial.sigma_uu") {
        cfg.initial.sigma_uu = parse_double(value, line_no, key);
      } else if (key == "initial.sigma_ll") {
        cfg.initial.sigma_ll = parse_double(value, line_no, key);
      } else if (is_model_key(key)) {
        const double v = parse_double(value, line_no, key);
        // Detunings are relative to the final level gap.
        if (key == "drive.delta" || key == "cavity.delta") deferred.emplace_back(std::string(key), v, line_no);
        else set_parameter(cfg.spec, key, v);
      } else {
        throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
      }
    } catch (const ModelError& e) {
      throw ConfigError(line_no, e.what());
    }
  }

  if (seen.count("drive.delta") && seen.count("drive.omega")) {
    throw ConfigError(seen["drive.delta"], "drive.delta and drive.omega are mutually exclusive");
  }
  if (seen.count("cavity.delta") && seen.count("cavity.omega")) {
    throw ConfigError(seen["cavity.delta"], "cavity.delta and cavity.omega are mutually exclusive");
  }
  for (const auto& [key, v, line] : deferred) set_parameter(cfg.spec, key, v);

  try {
    validate(cfg.spec);
  } catch (const ModelError& e) {
    throw ConfigError(0, e.what());
  }
  if (cfg.solver.record_every < 1) throw ConfigError(seen["solver.record_every"], "solver.record_every must be >= 1");
  if (cfg.solver.max_fock_cutoff < cfg.spec.cavity.fock_cutoff) {
    throw ConfigError(seen.count("solver.max_fock_cutoff") ? seen["solver.max_fock_cutoff"] : 0,
                      "solver.max_fock_cutoff is below cavity.fock_cutoff");
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& c) {
  const SystemSpec& s = c.spec;
  std::ostringstream out;
  auto kv = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [&](const char* key, double value) { kv(key, format_number(value)); };

  kv("treatment", c.treatment == Treatment::Classical ? "classical" : "quantum");
  num("levels.e_upper", s.levels.e_upper);
  num("levels.e_lower", s.levels.e_lower);
  num("drive.omega", s.drive.omega);
  num("drive.epsilon_re", s.drive.epsilon.real());
  num("drive.epsilon_im", s.drive.epsilon.imag());
  num("cavity.omega", s.cavity.omega_cav);
  num("cavity.g_re", s.cavity.g.real());
  num("cavity.g_im", s.cavity.g.imag());
  kv("cavity.fock_cutoff", std::to_string(s.cavity.fock_cutoff));
  num("reservoir_u.gamma", s.upper.gamma);
  num("reservoir_u.mu", s.upper.mu);
  num("reservoir_u.temperature", s.upper.temperature);
  kv("reservoir_u.occupation", format_occupation(s.upper.occupation));
  num("reservoir_l.gamma", s.lower.gamma);
  num("reservoir_l.mu", s.lower.mu);
  num("reservoir_l.temperature", s.lower.temperature);
  kv("reservoir_l.occupation", format_occupation(s.lower.occupation));
  num("bath.gamma", s.bath.gamma_b);
  num("bath.temperature", s.bath.temperature);
  kv("bath.occupation", format_occupation(s.bath.occupation));
  num("solver.tolerance", c.solver.tolerance);
  num("solver.t_final", c.solver.t_final);
  num("solver.dt", c.solver.dt);
  kv("solver.record_every", std::to_string(c.solver.record_every));
  kv("solver.max_fock_cutoff", std::to_string(c.solver.max_fock_cutoff));
  kv("solver.ordering", ordering_name(c.solver.ordering));
  num("initial.sigma_uu", c.initial.sigma_uu);
  num("initial.sigma_ll", c.initial.sigma_ll);
  return out.str();
}

}  // namespace tlsthermo::cli
