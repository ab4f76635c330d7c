#include "tlsthermo/bloch_gain.hpp"

#include <algorithm>
#include <cmath>

#include "tlsthermo/errors.hpp"
#include "tlsthermo/model.hpp"

namespace tlsthermo {

SubbandOccupation SubbandOccupation::fermi(double temperature, double mu) {
  if (!(temperature > 0.0)) throw ModelError("fermi occupation: temperature must be positive");
  return {FermiForm{temperature, mu}};
}

SubbandOccupation SubbandOccupation::linear(double f0, double slope, double e_ref) {
  return {Linear{f0, slope, e_ref}};
}

SubbandOccupation SubbandOccupation::tabulated(std::vector<std::pair<double, double>> nodes) {
  if (nodes.empty()) throw ModelError("tabulated occupation: no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i].second >= 0.0 && nodes[i].second <= 1.0)) {
      throw ModelError("tabulated occupation: values must lie in [0, 1]");
    }
    if (i > 0 && !(nodes[i].first > nodes[i - 1].first)) {
      throw ModelError("tabulated occupation: energies must be strictly increasing");
    }
  }
  return {Tabulated{std::move(nodes)}};
}

double SubbandOccupation::operator()(double energy) const {
  if (const auto* f = std::get_if<FermiForm>(&form)) return tlsthermo::fermi(energy, f->mu, f->temperature);
  if (const auto* l = std::get_if<Linear>(&form)) {
    return std::clamp(l->f0 + l->slope * (energy - l->e_ref), 0.0, 1.0);
  }
  const auto& nodes = std::get<Tabulated>(form).nodes;
  if (energy <= nodes.front().first) return nodes.front().second;
  if (energy >= nodes.back().first) return nodes.back().second;
  const auto hi = std::upper_bound(nodes.begin(), nodes.end(), energy,
                                   [](double e, const auto& node) { return e < node.first; });
  const auto lo = hi - 1;
  const double w = (energy - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

double occupation_bracket(double e_k0, double delta, const GainRates& gammas, const SubbandOccupation& f_upper,
                          const SubbandOccupation& f_lower) {
  const double gsum = gammas.gamma_u + gammas.gamma_l;
  if (!(gsum > 0.0)) throw ModelError("bloch_rate: gamma_u + gamma_l must be positive");
  return (gammas.gamma_l * (f_upper(e_k0) - f_lower(e_k0 - delta)) +
          gammas.gamma_u * (f_upper(e_k0 + delta) - f_lower(e_k0))) /
         gsum;
}

double bloch_rate(double e_k0, double delta, const GainRates& gammas, const SubbandOccupation& f_upper,
                  const SubbandOccupation& f_lower) {
  const double gsum = gammas.gamma_u + gammas.gamma_l;
  const double lorentzian = gsum / (delta * delta + gsum * gsum / 4.0);
  return lorentzian * occupation_bracket(e_k0, delta, gammas, f_upper, f_lower);
}

GainSpectrum gain_spectrum(double e_k0, const std::vector<double>& detunings, const GainRates& gammas,
                           const SubbandOccupation& f_upper, const SubbandOccupation& f_lower) {
  GainSpectrum s;
  s.k0_energy = e_k0;
  s.detunings = detunings;
  s.rates.reserve(detunings.size());
  for (double d : detunings) {
    if (!std::isfinite(d)) throw ModelError("gain_spectrum: non-finite detuning");
    s.rates.push_back(bloch_rate(e_k0, d, gammas, f_upper, f_lower));
  }
  return s;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 1) throw ModelError("grid: need at least one point");
  if (count == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return g;
}

AverageEnergyComparison average_energy_equivalence(double e_k0, double delta, const GainRates& gammas,
                                                   const SubbandOccupation& f_upper,
                                                   const SubbandOccupation& f_lower) {
  const double gsum = gammas.gamma_u + gammas.gamma_l;
  AverageEnergyComparison c;
  c.bracket_value = occupation_bracket(e_k0, delta, gammas, f_upper, f_lower);
  c.e_upper_avg = e_k0 + delta * gammas.gamma_u / gsum;
  c.e_lower_avg = e_k0 - delta * gammas.gamma_l / gsum;
  c.effective_arg_value = f_upper(c.e_upper_avg) - f_lower(c.e_lower_avg);
  c.difference = c.bracket_value - c.effective_arg_value;
  return c;
}

}  // namespace tlsthermo
