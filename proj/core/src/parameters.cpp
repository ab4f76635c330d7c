#include "tlsthermo/parameters.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "tlsthermo/errors.hpp"

namespace tlsthermo {
namespace {

const std::map<std::string, std::string, std::less<>>& aliases() {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"e_upper", "levels.e_upper"},     {"e_lower", "levels.e_lower"},
      {"omega", "drive.omega"},          {"epsilon", "drive.epsilon_re"},
      {"delta", "drive.delta"},          {"omega_cav", "cavity.omega"},
      {"g", "cavity.g_re"},              {"delta_cav", "cavity.delta"},
      {"fock_cutoff", "cavity.fock_cutoff"},
      {"gamma_u", "reservoir_u.gamma"},  {"gamma_l", "reservoir_l.gamma"},
      {"gamma_b", "bath.gamma"},         {"mu_u", "reservoir_u.mu"},
      {"mu_l", "reservoir_l.mu"},        {"T_u", "reservoir_u.temperature"},
      {"T_l", "reservoir_l.temperature"}, {"T_b", "bath.temperature"},
      {"T", "reservoirs.temperature"},   {"f_u", "reservoir_u.f"},
      {"f_l", "reservoir_l.f"},          {"n_b", "bath.n"},
  };
  return table;
}

double fixed_value(const OccupationSpec& occ) {
  if (const auto* f = std::get_if<OccupationSpec::Fixed>(&occ.mode)) return f->value;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

const std::vector<std::string>& parameter_keys() {
  static const std::vector<std::string> keys = {
      "levels.e_upper",          "levels.e_lower",          "drive.omega",
      "drive.delta",             "drive.epsilon_re",        "drive.epsilon_im",
      "cavity.omega",            "cavity.delta",            "cavity.g_re",
      "cavity.g_im",             "cavity.fock_cutoff",      "reservoir_u.gamma",
      "reservoir_u.mu",          "reservoir_u.temperature", "reservoir_u.f",
      "reservoir_l.gamma",       "reservoir_l.mu",          "reservoir_l.temperature",
      "reservoir_l.f",           "reservoirs.temperature",  "bath.gamma",
      "bath.temperature",        "bath.n",
  };
  return keys;
}

std::string canonical_parameter(std::string_view key) {
  const auto& keys = parameter_keys();
  for (const auto& k : keys) {
    if (k == key) return k;
  }
  if (auto it = aliases().find(key); it != aliases().end()) return it->second;
  throw ModelError("unknown parameter '" + std::string(key) + "'");
}

void set_parameter(SystemSpec& spec, std::string_view key, double value) {
  const std::string k = canonical_parameter(key);
  if (k == "levels.e_upper") spec.levels.e_upper = value;
  else if (k == "levels.e_lower") spec.levels.e_lower = value;
  else if (k == "drive.omega") spec.drive.omega = value;
  else if (k == "drive.delta") spec.drive.omega = spec.levels.gap() + value;
  else if (k == "drive.epsilon_re") spec.drive.epsilon.real(value);
  else if (k == "drive.epsilon_im") spec.drive.epsilon.imag(value);
  else if (k == "cavity.omega") spec.cavity.omega_cav = value;
  else if (k == "cavity.delta") spec.cavity.omega_cav = spec.levels.gap() + value;
  else if (k == "cavity.g_re") spec.cavity.g.real(value);
  else if (k == "cavity.g_im") spec.cavity.g.imag(value);
  else if (k == "cavity.fock_cutoff") {
    if (value != std::floor(value) || value < 1.0) throw ModelError("cavity.fock_cutoff must be a positive integer");
    spec.cavity.fock_cutoff = static_cast<int>(value);
  }
  else if (k == "reservoir_u.gamma") spec.upper.gamma = value;
  else if (k == "reservoir_u.mu") spec.upper.mu = value;
  else if (k == "reservoir_u.temperature") spec.upper.temperature = value;
  else if (k == "reservoir_u.f") spec.upper.occupation = OccupationSpec::fixed(value);
  else if (k == "reservoir_l.gamma") spec.lower.gamma = value;
  else if (k == "reservoir_l.mu") spec.lower.mu = value;
  else if (k == "reservoir_l.temperature") spec.lower.temperature = value;
  else if (k == "reservoir_l.f") spec.lower.occupation = OccupationSpec::fixed(value);
  else if (k == "reservoirs.temperature") spec.upper.temperature = spec.lower.temperature = value;
  else if (k == "bath.gamma") spec.bath.gamma_b = value;
  else if (k == "bath.temperature") spec.bath.temperature = value;
  else if (k == "bath.n") spec.bath.occupation = OccupationSpec::fixed(value);
}

double get_parameter(const SystemSpec& spec, std::string_view key) {
  const std::string k = canonical_parameter(key);
  if (k == "levels.e_upper") return spec.levels.e_upper;
  if (k == "levels.e_lower") return spec.levels.e_lower;
  if (k == "drive.omega") return spec.drive.omega;
  if (k == "drive.delta") return spec.drive.omega - spec.levels.gap();
  if (k == "drive.epsilon_re") return spec.drive.epsilon.real();
  if (k == "drive.epsilon_im") return spec.drive.epsilon.imag();
  if (k == "cavity.omega") return spec.cavity.omega_cav;
  if (k == "cavity.delta") return spec.cavity.omega_cav - spec.levels.gap();
  if (k == "cavity.g_re") return spec.cavity.g.real();
  if (k == "cavity.g_im") return spec.cavity.g.imag();
  if (k == "cavity.fock_cutoff") return spec.cavity.fock_cutoff;
  if (k == "reservoir_u.gamma") return spec.upper.gamma;
  if (k == "reservoir_u.mu") return spec.upper.mu;
  if (k == "reservoir_u.temperature") return spec.upper.temperature;
  if (k == "reservoir_u.f") return fixed_value(spec.upper.occupation);
  if (k == "reservoir_l.gamma") return spec.lower.gamma;
  if (k == "reservoir_l.mu") return spec.lower.mu;
  if (k == "reservoir_l.temperature") return spec.lower.temperature;
  if (k == "reservoir_l.f") return fixed_value(spec.lower.occupation);
  if (k == "reservoirs.temperature") {
    return spec.upper.temperature == spec.lower.temperature ? spec.upper.temperature
                                                            : std::numeric_limits<double>::quiet_NaN();
  }
  if (k == "bath.gamma") return spec.bath.gamma_b;
  if (k == "bath.temperature") return spec.bath.temperature;
  return fixed_value(spec.bath.occupation);
}

}  // namespace tlsthermo
