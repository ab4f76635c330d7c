#include "tlsthermo/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tlsthermo/errors.hpp"

namespace tlsthermo {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPopulationSlack = 1e-6;

BlochState axpy(const BlochState& s, double h, const BlochDerivative& d) {
  return {s.sigma_uu + h * d.d_sigma_uu, s.sigma_ll + h * d.d_sigma_ll, s.sigma_ul + h * d.d_sigma_ul};
}

double max_rate(const SystemSpec& spec) {
  const double delta = detuning(spec.levels, spec.drive.omega);
  return std::max({spec.upper.gamma, spec.lower.gamma, std::abs(delta), std::abs(spec.drive.epsilon)});
}

}  // namespace

bool BlochState::one_body_positive(double tolerance) const {
  const double c2 = std::norm(sigma_ul);
  return c2 <= sigma_uu * sigma_ll + tolerance && c2 <= (1.0 - sigma_uu) * (1.0 - sigma_ll) + tolerance;
}

double BlochDerivative::max_abs() const {
  return std::max({std::abs(d_sigma_uu), std::abs(d_sigma_ll), std::abs(d_sigma_ul.real()),
                   std::abs(d_sigma_ul.imag())});
}

BlochDerivative bloch_rhs(const BlochState& s, const SystemSpec& spec, const Occupations& occ) {
  const Complex eps = spec.drive.epsilon;
  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  const double delta = detuning(spec.levels, spec.drive.omega);
  const Complex sigma_lu = std::conj(s.sigma_ul);
  const Complex exchange = kI * (std::conj(eps) * s.sigma_ul - eps * sigma_lu);

  BlochDerivative d;
  d.d_sigma_uu = gu * (occ.f_u - s.sigma_uu) + exchange.real();
  d.d_sigma_ll = gl * (occ.f_l - s.sigma_ll) - exchange.real();
  d.d_sigma_ul = kI * delta * s.sigma_ul + kI * eps * (s.sigma_uu - s.sigma_ll) - 0.5 * (gu + gl) * s.sigma_ul;
  return d;
}

double default_classical_dt(const SystemSpec& spec) { return 0.02 / max_rate(spec); }

BlochTrajectory evolve(const BlochState& state0, const SystemSpec& spec, const Occupations& occ,
                       const ClassicalEvolveOptions& options) {
  const double dt = options.dt > 0.0 ? options.dt : default_classical_dt(spec);
  if (!(dt < 0.1 / max_rate(spec))) {
    std::ostringstream msg;
    msg << "evolve: step " << dt << " exceeds stability bound " << 0.1 / max_rate(spec);
    throw SolverError(msg.str(), dt);
  }
  if (!(options.t_final >= 0.0)) throw ModelError("evolve: t_final must be non-negative");

  const auto steps = static_cast<std::size_t>(std::ceil(options.t_final / dt - 1e-9));
  const double h = steps > 0 ? options.t_final / static_cast<double>(steps) : 0.0;
  const std::size_t every = std::max<std::size_t>(options.record_every, 1);

  BlochTrajectory traj;
  traj.times.reserve(steps / every + 2);
  traj.states.reserve(steps / every + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(state0);

  BlochState s = state0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const BlochDerivative k1 = bloch_rhs(s, spec, occ);
    const BlochDerivative k2 = bloch_rhs(axpy(s, 0.5 * h, k1), spec, occ);
    const BlochDerivative k3 = bloch_rhs(axpy(s, 0.5 * h, k2), spec, occ);
    const BlochDerivative k4 = bloch_rhs(axpy(s, h, k3), spec, occ);
    s.sigma_uu += h / 6.0 * (k1.d_sigma_uu + 2.0 * k2.d_sigma_uu + 2.0 * k3.d_sigma_uu + k4.d_sigma_uu);
    s.sigma_ll += h / 6.0 * (k1.d_sigma_ll + 2.0 * k2.d_sigma_ll + 2.0 * k3.d_sigma_ll + k4.d_sigma_ll);
    s.sigma_ul += h / 6.0 * (k1.d_sigma_ul + 2.0 * k2.d_sigma_ul + 2.0 * k3.d_sigma_ul + k4.d_sigma_ul);

    const bool out_of_range = !(s.sigma_uu > -kPopulationSlack && s.sigma_uu < 1.0 + kPopulationSlack &&
                                s.sigma_ll > -kPopulationSlack && s.sigma_ll < 1.0 + kPopulationSlack &&
                                std::abs(s.sigma_ul) < 1.0 + kPopulationSlack);
    if (out_of_range) {
      std::ostringstream msg;
      msg << "evolve: state left the physical range at t=" << h * static_cast<double>(n)
          << " (sigma_uu=" << s.sigma_uu << ", sigma_ll=" << s.sigma_ll << ")";
      throw SolverError(msg.str(), std::max(std::abs(s.sigma_uu), std::abs(s.sigma_ll)));
    }
    if (!s.one_body_positive()) traj.positivity_warning = true;
    if (n % every == 0 || n == steps) {
      traj.times.push_back(h * static_cast<double>(n));
      traj.states.push_back(s);
    }
  }
  return traj;
}

ClassicalSteadyState steady_state_closed_form(const SystemSpec& spec, const Occupations& occ) {
  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  if (!(gu > 0.0 && gl > 0.0)) throw ModelError("steady state: both reservoir rates must be positive");
  const double gsum = gu + gl;
  const double delta = detuning(spec.levels, spec.drive.omega);
  const Complex eps = spec.drive.epsilon;
  const double lorentz = gsum * gsum / 4.0 + delta * delta;

  ClassicalSteadyState ss;
  ss.alpha = std::norm(eps) * gsum / lorentz;
  const double denom = gu * gl + ss.alpha * gsum;
  const double mixed = ss.alpha * (gu * occ.f_u + gl * occ.f_l);
  ss.bloch.sigma_uu = (mixed + gu * gl * occ.f_u) / denom;
  ss.bloch.sigma_ll = (mixed + gu * gl * occ.f_l) / denom;
  ss.saturation_h = gu * gl / denom;
  ss.rate = ss.alpha * ss.saturation_h * (occ.f_u - occ.f_l);
  ss.bloch.sigma_ul = -eps * (ss.bloch.sigma_uu - ss.bloch.sigma_ll) / Complex(delta, gsum / 2.0);
  return ss;
}

FluxReport fluxes_classical(const ClassicalSteadyState& ss, const SystemSpec& spec, const Occupations& occ) {
  const double residual = bloch_rhs(ss.bloch, spec, occ).max_abs();
  if (!(residual < kClassicalStationarityTolerance)) {
    throw SolverError("fluxes_classical: state is not stationary", residual);
  }
  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  const Complex coherence = std::conj(spec.drive.epsilon) * ss.bloch.sigma_ul;

  FluxReport r;
  r.treatment = Treatment::Classical;
  r.rate = 2.0 * coherence.imag();
  r.ndot_u = gu * (occ.f_u - ss.bloch.sigma_uu);
  r.ndot_l = gl * (occ.f_l - ss.bloch.sigma_ll);
  r.edot_u = spec.levels.e_upper * r.ndot_u - gu * coherence.real();
  r.edot_l = spec.levels.e_lower * r.ndot_l - gl * coherence.real();
  r.edot_b_or_power = -spec.drive.omega * r.rate;
  r.predicted = effective_energies_classical(spec.levels, spec.drive, gu, gl);
  if (std::abs(r.rate) >= kRateDeadBand) {
    r.measured = EffectiveEnergies{r.edot_u / r.rate, -r.edot_l / r.rate, -r.edot_b_or_power / r.rate};
  }
  r.law1_residual = r.edot_u + r.edot_l + r.edot_b_or_power;
  return r;
}

double entropy_production_classical(const FluxReport& report, const SystemSpec& spec) {
  const auto& e = report.predicted;
  return report.rate * ((e.lower - spec.lower.mu) / spec.lower.temperature -
                        (e.upper - spec.upper.mu) / spec.upper.temperature);
}

}  // namespace tlsthermo
