#pragma once

#include <optional>

#include "tlsthermo/model.hpp"

namespace tlsthermo {

// Steady-state flows into the system. Positive values flow from the
// reservoir (or field) into the system.
struct FluxReport {
  Treatment treatment = Treatment::Classical;
  double rate = 0.0;  // net u -> l transition rate R^ss
  double ndot_u = 0.0;
  double ndot_l = 0.0;
  double edot_u = 0.0;
  double edot_l = 0.0;
  // Classical: power P_S delivered by the field. Quantum: bosonic bath flow.
  double edot_b_or_power = 0.0;

  // Closed-form effective energies for this scenario.
  EffectiveEnergies predicted{};
  // Flux ratios Edot_u/R, -Edot_l/R, and -Edot_b/R (or -P_S/R); empty when
  // |R| is below the dead band.
  std::optional<EffectiveEnergies> measured{};

  double law1_residual = 0.0;
};

inline constexpr double kRateDeadBand = 1e-12;

}  // namespace tlsthermo
