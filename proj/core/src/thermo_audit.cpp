#include "tlsthermo/thermo_audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tlsthermo/classical.hpp"
#include "tlsthermo/errors.hpp"
#include "tlsthermo/parameters.hpp"

namespace tlsthermo {
namespace {

int dead_band_sign(double x, double band) { return x > band ? 1 : (x < -band ? -1 : 0); }

bool equal_temperatures(const SystemSpec& spec) {
  const double tu = spec.upper.temperature;
  const double tl = spec.lower.temperature;
  return std::abs(tu - tl) <= 1e-12 * std::max(tu, tl);
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Emission:
      return "emission";
    case Regime::Absorption:
      return "absorption";
    case Regime::Idle:
      break;
  }
  return "idle";
}

Regime regime_of(double rate) {
  const int s = dead_band_sign(rate, kRateDeadBand);
  return s > 0 ? Regime::Emission : (s < 0 ? Regime::Absorption : Regime::Idle);
}

EntropyReport entropy_report(const FluxReport& flux, const SystemSpec& spec) {
  const double tu = spec.upper.temperature;
  const double tl = spec.lower.temperature;
  if (!(tu > 0.0 && tl > 0.0)) throw ModelError("entropy_report: temperatures must be positive");

  EntropyReport e;
  e.s_dot_u = (-flux.edot_u + flux.ndot_u * spec.upper.mu) / tu;
  e.s_dot_l = (-flux.edot_l + flux.ndot_l * spec.lower.mu) / tl;
  if (flux.treatment == Treatment::Quantum) {
    const double tb = spec.bath.temperature;
    if (!(tb > 0.0)) throw ModelError("entropy_report: bath temperature must be positive");
    e.s_dot_b = -flux.edot_b_or_power / tb;
  }
  e.total = e.s_dot_u + e.s_dot_l + e.s_dot_b;
  e.law1_residual = flux.law1_residual;
  e.regime = regime_of(flux.rate);
  return e;
}

RegimeCheck classify_regime(const FluxReport& flux, const SystemSpec& spec) {
  RegimeCheck c;
  c.regime = regime_of(flux.rate);
  const bool quantum = flux.treatment == Treatment::Quantum;
  const bool thermal_effective = spec.upper.occupation.is_effective() && spec.lower.occupation.is_effective() &&
                                 (!quantum || spec.bath.occupation.is_effective());
  if (!equal_temperatures(spec)) return c;

  const double bias = spec.upper.mu - spec.lower.mu;
  const double t = spec.upper.temperature;
  const int rate_sign = dead_band_sign(flux.rate, kRateDeadBand);
  if (quantum) {
    c.sign_argument = bias - flux.predicted.photon * (1.0 - t / spec.bath.temperature);
    c.electroluminescent_cooling = rate_sign > 0 && bias < flux.predicted.photon;
  } else {
    c.sign_argument = bias - spec.drive.omega;
  }
  if (thermal_effective) {
    c.sign_law_applicable = true;
    const int arg_sign = dead_band_sign(c.sign_argument, 1e-12 * std::max(1.0, std::abs(bias)));
    c.sign_law_ok = rate_sign == arg_sign || rate_sign == 0 || arg_sign == 0;
  }

  if (quantum && thermal_effective && rate_sign < 0 && spec.bath.temperature > t) {
    c.carnot_applicable = true;
    c.electrical_power = -flux.rate * bias;
    c.carnot_limit = flux.edot_b_or_power * (spec.bath.temperature - t) / spec.bath.temperature;
    c.carnot_ok = c.electrical_power <= c.carnot_limit + 1e-10;
  }
  return c;
}

AuditRecord audit_point(const SystemSpec& spec, const AuditOptions& options) {
  AuditRecord rec;
  rec.spec = spec;
  try {
    validate(spec);
    rec.occupations = resolve_occupations(spec, options.treatment);
    const Occupations& occ = *rec.occupations;
    if (options.treatment == Treatment::Classical) {
      const ClassicalSteadyState ss = steady_state_closed_form(spec, occ);
      rec.flux = fluxes_classical(ss, spec, occ);
    } else {
      const QuantumSolution sol = solve_quantum_steady_state(spec, occ, options.quantum);
      rec.fock_cutoff_used = sol.layout.fock_cutoff();
      rec.flux = fluxes_quantum(sol.state.rho, sol.ops, spec, occ);
      rec.quantum = observables(sol.state.rho, sol.ops, spec);
      if (occ.f_u < 1.0 && occ.f_l < 1.0) rec.sign = sign_condition(*rec.quantum, occ);
    }
    rec.entropy = entropy_report(*rec.flux, spec);
    rec.regime = classify_regime(*rec.flux, spec);
    rec.violation = rec.entropy->total < -options.tolerance;
  } catch (const SolverError& e) {
    rec.error = e.what();
    rec.convergence_failure = true;
  } catch (const ModelError& e) {
    rec.error = e.what();
  }
  return rec;
}

std::vector<std::vector<std::pair<std::string, double>>> sample_parameters(const SweepPlan& plan) {
  std::vector<std::vector<std::pair<std::string, double>>> out;
  for (const auto& r : plan.ranges) {
    canonical_parameter(r.key);
    if (plan.sampler == Sampler::Grid && r.count < 1) throw ModelError("sweep: range '" + r.key + "' has no points");
  }

  if (plan.sampler == Sampler::UniformRandom) {
    std::mt19937_64 rng(plan.seed);
    out.reserve(plan.samples);
    for (std::size_t i = 0; i < plan.samples; ++i) {
      std::vector<std::pair<std::string, double>> point;
      for (const auto& r : plan.ranges) point.emplace_back(r.key, r.lo + (r.hi - r.lo) * unit_uniform(rng));
      out.push_back(std::move(point));
    }
    return out;
  }

  std::size_t total = 1;
  for (const auto& r : plan.ranges) total *= static_cast<std::size_t>(r.count);
  out.reserve(total);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<std::pair<std::string, double>> point(plan.ranges.size());
    std::size_t rest = n;
    for (std::size_t k = plan.ranges.size(); k-- > 0;) {
      const auto& r = plan.ranges[k];
      const auto count = static_cast<std::size_t>(r.count);
      const std::size_t i = rest % count;
      rest /= count;
      const double v = count == 1 ? r.lo : r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(count - 1);
      point[k] = {r.key, v};
    }
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<SweepResult> sweep(const SystemSpec& scenario, const SweepPlan& plan, const AuditOptions& options) {
  const auto points = sample_parameters(plan);
  std::vector<SweepResult> results;
  results.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    SystemSpec spec = scenario;
    for (const auto& [key, value] : points[i]) set_parameter(spec, key, value);
    results.push_back({i, points[i], audit_point(spec, options)});
  }
  return results;
}

SystemSpec with_all_occupations(SystemSpec spec, const OccupationSpec& occupation) {
  spec.upper.occupation = occupation;
  spec.lower.occupation = occupation;
  spec.bath.occupation = occupation;
  return spec;
}

ViolationSearch find_violation_with_bare_energies(const SystemSpec& scenario, const std::vector<ParameterRange>& ranges,
                                                  std::uint64_t seed, std::size_t budget,
                                                  const AuditOptions& options) {
  SweepPlan plan{ranges, Sampler::UniformRandom, seed, budget};
  const auto points = sample_parameters(plan);
  ViolationSearch search;
  for (std::size_t i = 0; i < points.size(); ++i) {
    SystemSpec spec = scenario;
    for (const auto& [key, value] : points[i]) set_parameter(spec, key, value);
    spec = with_all_occupations(spec, OccupationSpec::bare());
    ++search.samples_tried;
    AuditRecord rec = audit_point(spec, options);
    if (rec.error.empty() && rec.violation) {
      search.effective =
          SweepResult{i, points[i], audit_point(with_all_occupations(spec, OccupationSpec::effective()), options)};
      search.bare = SweepResult{i, points[i], std::move(rec)};
      break;
    }
  }
  return search;
}

}  // namespace tlsthermo
