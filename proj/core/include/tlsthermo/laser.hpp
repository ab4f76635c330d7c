#pragma once

// Mean-field (semiclassical) laser: the cavity field is replaced by its
// coherent amplitude and the two-level system sees it as a classical drive
// epsilon = g * a.

#include <vector>

#include "tlsthermo/model.hpp"

namespace tlsthermo {

struct LaserSolution {
  double omega = 0.0;
  Complex a_ss{0.0, 0.0};
  Complex sigma_ul_ss{0.0, 0.0};
  double intensity = 0.0;
  bool above_threshold = false;
  // Right-hand side coefficient A = (omega - omega_cav) Delta - gamma_b (gamma_u + gamma_l) / 4.
  double a_coefficient = 0.0;
  // Smallest f_u - f_l that reaches threshold.
  double threshold_inversion = 0.0;
};

// Oscillation frequency at which the imaginary part of the consistency
// condition vanishes; a rate-weighted mean of omega_cav and the bare gap.
double pulled_frequency(const EnergyLevels& levels, const CavitySpec& cavity, double gamma_u, double gamma_l,
                        double gamma_b);

// Copy of spec with the classical drive frequency set to the pulled
// frequency, so that resolve_occupations(.., Classical) evaluates the
// effective energies at the laser frequency.
SystemSpec at_pulled_frequency(const SystemSpec& spec);

// Saturation coefficient S with H(x) = 1 / (1 + S x).
double saturation_coefficient(double gamma_u, double gamma_l, double delta);

LaserSolution solve_lasing(const SystemSpec& spec, const Occupations& occ);

struct MeanFieldState {
  double sigma_uu = 0.0;
  double sigma_ll = 0.0;
  Complex sigma_ul{0.0, 0.0};
  Complex a{0.0, 0.0};
};

struct MeanFieldTrajectory {
  std::vector<double> times;
  std::vector<MeanFieldState> states;

  const MeanFieldState& final_state() const { return states.back(); }
};

struct MeanFieldOptions {
  double t_final = 1000.0;
  double dt = 0.0;  // zero selects 0.02 / (largest rate)
  std::size_t record_every = 1;
};

// Time derivative in the frame rotating at the pulled frequency.
MeanFieldState meanfield_rhs(const MeanFieldState& s, const SystemSpec& spec, const Occupations& occ);

// RK4 on the factorized equations. Throws SolverError once |a| exceeds 1e6.
MeanFieldTrajectory evolve_meanfield(const MeanFieldState& state0, const SystemSpec& spec, const Occupations& occ,
                                     const MeanFieldOptions& options);

}  // namespace tlsthermo
