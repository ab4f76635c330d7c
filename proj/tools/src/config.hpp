#pragma once

// Scenario files: one `key = value` per line, `#` starts a comment, keys are
// dotted (reservoir_u.gamma). Occupations are written as
// `fixed:<value>`, `thermal-bare` or `thermal-effective`.

#include <stdexcept>
#include <string>
#include <string_view>

#include "tlsthermo/model.hpp"
#include "tlsthermo/quantum.hpp"

namespace tlsthermo::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct SolverSettings {
  double tolerance = 1e-10;
  double t_final = 200.0;
  double dt = 0.0;  // zero: solver default
  int record_every = 100;
  int max_fock_cutoff = 48;
  FermionOrdering ordering = FermionOrdering::LowerFirst;
};

struct InitialState {
  double sigma_uu = 0.0;
  double sigma_ll = 1.0;
};

struct ScenarioConfig {
  SystemSpec spec{};
  Treatment treatment = Treatment::Classical;
  SolverSettings solver{};
  InitialState initial{};
};

// Starting point for parsing and for commands run without --config: unit gap,
// drive and cavity on resonance with weak couplings, equal-temperature leads.
ScenarioConfig default_scenario();

// Keys not present keep their default_scenario() values.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& config);

OccupationSpec parse_occupation(std::string_view text);
std::string format_occupation(const OccupationSpec& occ);

// printf("%.17g").
std::string format_number(double value);

}  // namespace tlsthermo::cli
