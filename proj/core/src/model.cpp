#include "tlsthermo/model.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include "tlsthermo/errors.hpp"

namespace tlsthermo {
namespace {

void check_occupation(const OccupationSpec& occ, bool fermionic, const char* who) {
  if (const auto* f = std::get_if<OccupationSpec::Fixed>(&occ.mode)) {
    if (!std::isfinite(f->value) || f->value < 0.0 || (fermionic && f->value > 1.0)) {
      throw ModelError(std::string(who) + ": fixed occupation out of range: " + std::to_string(f->value));
    }
  }
}

double fermionic_occupation(const FermionicReservoir& r, double bare, double effective) {
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, OccupationSpec::Fixed>) {
          return m.value;
        } else if constexpr (std::is_same_v<M, OccupationSpec::ThermalAtBareEnergy>) {
          return fermi(bare, r.mu, r.temperature);
        } else {
          return fermi(effective, r.mu, r.temperature);
        }
      },
      r.occupation.mode);
}

}  // namespace

void validate(const SystemSpec& spec) {
  const auto& lv = spec.levels;
  if (!std::isfinite(lv.e_upper) || !std::isfinite(lv.e_lower) || !(lv.e_upper > lv.e_lower)) {
    throw ModelError("levels: e_upper must exceed e_lower");
  }
  if (!(spec.drive.omega > 0.0) || !std::isfinite(spec.drive.omega)) {
    throw ModelError("drive: omega must be positive");
  }
  if (!std::isfinite(std::abs(spec.drive.epsilon))) throw ModelError("drive: epsilon not finite");
  if (!(spec.cavity.omega_cav > 0.0) || !std::isfinite(spec.cavity.omega_cav)) {
    throw ModelError("cavity: omega_cav must be positive");
  }
  if (!std::isfinite(std::abs(spec.cavity.g))) throw ModelError("cavity: g not finite");
  if (spec.cavity.fock_cutoff < 1) throw ModelError("cavity: fock_cutoff must be >= 1");
  for (const auto* r : {&spec.upper, &spec.lower}) {
    const char* who = r == &spec.upper ? "reservoir_u" : "reservoir_l";
    if (!(r->gamma > 0.0) || !std::isfinite(r->gamma)) throw ModelError(std::string(who) + ": gamma must be positive");
    if (!(r->temperature > 0.0)) throw ModelError(std::string(who) + ": temperature must be positive");
    if (!std::isfinite(r->mu)) throw ModelError(std::string(who) + ": mu not finite");
    check_occupation(r->occupation, true, who);
  }
  if (!(spec.bath.gamma_b >= 0.0) || !std::isfinite(spec.bath.gamma_b)) throw ModelError("bath: gamma must be >= 0");
  if (!(spec.bath.temperature > 0.0)) throw ModelError("bath: temperature must be positive");
  check_occupation(spec.bath.occupation, false, "bath");
}

double detuning(const EnergyLevels& levels, double omega) { return omega - levels.gap(); }

EffectiveEnergies effective_energies_classical(const EnergyLevels& levels, const ClassicalDrive& drive,
                                               double gamma_u, double gamma_l) {
  const double total = gamma_u + gamma_l;
  if (!(total > 0.0)) throw ModelError("effective energies: gamma_u + gamma_l must be positive");
  const double delta = detuning(levels, drive.omega);
  return {levels.e_upper + gamma_u * delta / total, levels.e_lower - gamma_l * delta / total, drive.omega};
}

EffectiveEnergies effective_energies_quantum(const EnergyLevels& levels, const CavitySpec& cavity,
                                             double gamma_u, double gamma_l, double gamma_b) {
  const double total = gamma_u + gamma_l + gamma_b;
  if (!(total > 0.0)) throw ModelError("effective energies: total rate must be positive");
  const double delta_cav = detuning(levels, cavity.omega_cav);
  return {levels.e_upper + gamma_u * delta_cav / total, levels.e_lower - gamma_l * delta_cav / total,
          cavity.omega_cav - gamma_b * delta_cav / total};
}

double fermi(double e, double mu, double temperature) {
  if (!(temperature > 0.0)) throw ModelError("fermi: temperature must be positive");
  const double x = (e - mu) / temperature;
  // Symmetric evaluation keeps full relative precision in both tails.
  if (x > 0.0) {
    const double t = std::exp(-x);
    return t / (1.0 + t);
  }
  return 1.0 / (std::exp(x) + 1.0);
}

double bose(double e, double temperature) {
  if (!(temperature > 0.0)) throw ModelError("bose: temperature must be positive");
  if (!(e > 0.0)) throw ModelError("bose: photon energy must be positive, got " + std::to_string(e));
  return 1.0 / std::expm1(e / temperature);
}

Occupations resolve_occupations(const SystemSpec& spec, Treatment treatment) {
  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  const EffectiveEnergies eff = treatment == Treatment::Classical
                                    ? effective_energies_classical(spec.levels, spec.drive, gu, gl)
                                    : effective_energies_quantum(spec.levels, spec.cavity, gu, gl, spec.bath.gamma_b);
  const double bare_photon = treatment == Treatment::Classical ? spec.drive.omega : spec.cavity.omega_cav;

  Occupations occ;
  occ.f_u = fermionic_occupation(spec.upper, spec.levels.e_upper, eff.upper);
  occ.f_l = fermionic_occupation(spec.lower, spec.levels.e_lower, eff.lower);
  occ.n_b = std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, OccupationSpec::Fixed>) {
          return m.value;
        } else if constexpr (std::is_same_v<M, OccupationSpec::ThermalAtBareEnergy>) {
          return bose(bare_photon, spec.bath.temperature);
        } else {
          return bose(eff.photon, spec.bath.temperature);
        }
      },
      spec.bath.occupation.mode);
  return occ;
}

}  // namespace tlsthermo
