#pragma once

// Classically driven two-level system in the frame rotating with the drive.

#include <cstddef>
#include <string>
#include <vector>

#include "tlsthermo/flux_report.hpp"
#include "tlsthermo/model.hpp"

namespace tlsthermo {

// Reduced single-particle density matrix sigma_ij = Tr{c_j^dag c_i rho}.
struct BlochState {
  double sigma_uu = 0.0;
  double sigma_ll = 0.0;
  Complex sigma_ul{0.0, 0.0};

  // Both one-body positivity bounds |s_ul|^2 <= s_uu s_ll and
  // |s_ul|^2 <= (1 - s_uu)(1 - s_ll), up to tolerance.
  bool one_body_positive(double tolerance = 1e-9) const;
};

struct BlochDerivative {
  double d_sigma_uu = 0.0;
  double d_sigma_ll = 0.0;
  Complex d_sigma_ul{0.0, 0.0};

  double max_abs() const;
};

struct ClassicalSteadyState {
  BlochState bloch{};
  double rate = 0.0;
  double alpha = 0.0;
  double saturation_h = 1.0;
};

BlochDerivative bloch_rhs(const BlochState& state, const SystemSpec& spec, const Occupations& occ);

struct ClassicalEvolveOptions {
  double t_final = 100.0;
  // Zero selects the default step 0.02 / (largest rate in the problem).
  double dt = 0.0;
  // Store every n-th step; the final state is always stored.
  std::size_t record_every = 1;
};

struct BlochTrajectory {
  std::vector<double> times;
  std::vector<BlochState> states;
  // Set when the state left the one-body positivity region at some step.
  bool positivity_warning = false;

  const BlochState& final_state() const { return states.back(); }
};

double default_classical_dt(const SystemSpec& spec);

// Fixed-step RK4 over bloch_rhs. Throws SolverError if a population leaves
// [-1e-6, 1 + 1e-6] or the step exceeds the stability heuristic.
BlochTrajectory evolve(const BlochState& state0, const SystemSpec& spec, const Occupations& occ,
                       const ClassicalEvolveOptions& options);

ClassicalSteadyState steady_state_closed_form(const SystemSpec& spec, const Occupations& occ);

inline constexpr double kClassicalStationarityTolerance = 1e-9;

// Flows evaluated from the Bloch state; rejects non-stationary input.
FluxReport fluxes_classical(const ClassicalSteadyState& ss, const SystemSpec& spec, const Occupations& occ);

// Sum of the two reservoir entropy production rates; the classical field
// carries none.
double entropy_production_classical(const FluxReport& report, const SystemSpec& spec);

}  // namespace tlsthermo
