#pragma once

// Net inter-subband transition rate under detuning, with occupation
// differences taken at detuning-shifted in-plane energies.

#include <utility>
#include <variant>
#include <vector>

namespace tlsthermo {

struct SubbandOccupation {
  struct FermiForm {
    double temperature = 0.1;
    double mu = 0.0;
  };
  // f0 + slope * (E - e_ref), clamped to [0, 1].
  struct Linear {
    double f0 = 0.5;
    double slope = 0.0;
    double e_ref = 0.0;
  };
  // Piecewise linear through (energy, value) nodes, flat outside.
  struct Tabulated {
    std::vector<std::pair<double, double>> nodes;
  };

  std::variant<FermiForm, Linear, Tabulated> form{FermiForm{}};

  static SubbandOccupation fermi(double temperature, double mu);
  static SubbandOccupation linear(double f0, double slope, double e_ref = 0.0);
  // Throws ModelError unless energies are strictly increasing and values lie in [0, 1].
  static SubbandOccupation tabulated(std::vector<std::pair<double, double>> nodes);

  double operator()(double energy) const;
};

struct GainRates {
  double gamma_u = 0.05;
  double gamma_l = 0.05;
};

// Lorentzian line shape times the rate-weighted occupation bracket. The
// matrix-element prefactor is set to one (arbitrary units).
double bloch_rate(double e_k0, double delta, const GainRates& gammas, const SubbandOccupation& f_upper,
                  const SubbandOccupation& f_lower);

// Only the occupation bracket of bloch_rate.
double occupation_bracket(double e_k0, double delta, const GainRates& gammas, const SubbandOccupation& f_upper,
                          const SubbandOccupation& f_lower);

struct GainSpectrum {
  double k0_energy = 0.0;
  std::vector<double> detunings;
  std::vector<double> rates;
};

GainSpectrum gain_spectrum(double e_k0, const std::vector<double>& detunings, const GainRates& gammas,
                           const SubbandOccupation& f_upper, const SubbandOccupation& f_lower);

// Uniform grid of `count` points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

struct AverageEnergyComparison {
  double bracket_value = 0.0;
  double effective_arg_value = 0.0;  // f_u(E~u) - f_l(E~l)
  double difference = 0.0;
  double e_upper_avg = 0.0;  // E~u_k0
  double e_lower_avg = 0.0;  // E~l_k0
};

AverageEnergyComparison average_energy_equivalence(double e_k0, double delta, const GainRates& gammas,
                                                   const SubbandOccupation& f_upper,
                                                   const SubbandOccupation& f_lower);

}  // namespace tlsthermo
