#pragma once

// Physical parameters of the detuned two-level system and the closed-form
// quantities shared by every solver.
//
// Natural units throughout: hbar = 1 and k_B = 1, so energies, angular
// frequencies, rates and temperatures are all measured in one energy unit.

#include <complex>
#include <variant>

namespace tlsthermo {

using Complex = std::complex<double>;

struct EnergyLevels {
  double e_upper = 1.0;
  double e_lower = 0.0;

  double gap() const { return e_upper - e_lower; }
};

// Classical field coupled in the rotating wave approximation.
struct ClassicalDrive {
  double omega = 1.0;
  Complex epsilon{0.0, 0.0};
};

// Single quantized cavity mode, truncated at fock_cutoff photons.
struct CavitySpec {
  double omega_cav = 1.0;
  Complex g{0.0, 0.0};
  int fock_cutoff = 12;
};

// How a reservoir occupation is produced.
struct OccupationSpec {
  struct Fixed {
    double value = 0.0;
  };
  struct ThermalAtBareEnergy {};
  struct ThermalAtEffectiveEnergy {};

  std::variant<Fixed, ThermalAtBareEnergy, ThermalAtEffectiveEnergy> mode{ThermalAtEffectiveEnergy{}};

  static OccupationSpec fixed(double value) { return {Fixed{value}}; }
  static OccupationSpec bare() { return {ThermalAtBareEnergy{}}; }
  static OccupationSpec effective() { return {ThermalAtEffectiveEnergy{}}; }

  bool is_fixed() const { return std::holds_alternative<Fixed>(mode); }
  bool is_bare() const { return std::holds_alternative<ThermalAtBareEnergy>(mode); }
  bool is_effective() const { return std::holds_alternative<ThermalAtEffectiveEnergy>(mode); }
};

struct FermionicReservoir {
  double gamma = 0.1;
  OccupationSpec occupation{};
  double mu = 0.0;
  double temperature = 0.1;
};

struct BosonicBath {
  double gamma_b = 0.0;
  OccupationSpec occupation{};
  double temperature = 0.1;
};

struct SystemSpec {
  EnergyLevels levels{};
  ClassicalDrive drive{};
  CavitySpec cavity{};
  FermionicReservoir upper{};
  FermionicReservoir lower{};
  BosonicBath bath{};
};

enum class Treatment { Classical, Quantum };

// Energies at which the reservoirs exchange particles in the steady state.
// photon is hbar*omega in the classical treatment.
struct EffectiveEnergies {
  double upper = 0.0;
  double lower = 0.0;
  double photon = 0.0;
};

// Concrete reservoir occupations after dispatching the OccupationSpecs.
struct Occupations {
  double f_u = 0.0;
  double f_l = 0.0;
  double n_b = 0.0;
};

// Throws ModelError on any violated type invariant.
void validate(const SystemSpec& spec);

double detuning(const EnergyLevels& levels, double omega);

// Detuning shared out according to each level's share of the broadening
// gamma_u + gamma_l.
EffectiveEnergies effective_energies_classical(const EnergyLevels& levels, const ClassicalDrive& drive,
                                               double gamma_u, double gamma_l);

// Cavity detuning shared out over gamma_u + gamma_l + gamma_b; the photon
// picks up the cavity-loss share.
EffectiveEnergies effective_energies_quantum(const EnergyLevels& levels, const CavitySpec& cavity,
                                             double gamma_u, double gamma_l, double gamma_b);

double fermi(double e, double mu, double temperature);

// Requires e > 0; a non-positive photon energy has no thermal occupation.
double bose(double e, double temperature);

Occupations resolve_occupations(const SystemSpec& spec, Treatment treatment);

}  // namespace tlsthermo
