#pragma once

// Named scalar parameters of a SystemSpec, shared by sweeps and the
// scenario configuration.

#include <string>
#include <string_view>
#include <vector>

#include "tlsthermo/model.hpp"

namespace tlsthermo {

// Canonical dotted keys (levels.e_upper, reservoir_u.gamma, ...), in a fixed order.
const std::vector<std::string>& parameter_keys();

// Maps short aliases (gamma_u, omega_cav, T_b, f_u, delta, ...) to their
// canonical key; canonical keys map to themselves. Throws ModelError for
// unknown names.
std::string canonical_parameter(std::string_view key);

// Occupation keys (reservoir_u.f, reservoir_l.f, bath.n) switch the
// reservoir to a fixed occupation. The virtual keys drive.delta and
// cavity.delta set a frequency relative to the current level gap;
// reservoirs.temperature sets both fermionic temperatures.
void set_parameter(SystemSpec& spec, std::string_view key, double value);

// NaN for occupation keys whose reservoir is not fixed.
double get_parameter(const SystemSpec& spec, std::string_view key);

}  // namespace tlsthermo
