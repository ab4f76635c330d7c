#include "tlsthermo/laser.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tlsthermo/errors.hpp"

namespace tlsthermo {
namespace {

constexpr Complex kI{0.0, 1.0};

MeanFieldState axpy(const MeanFieldState& s, double h, const MeanFieldState& d) {
  return {s.sigma_uu + h * d.sigma_uu, s.sigma_ll + h * d.sigma_ll, s.sigma_ul + h * d.sigma_ul, s.a + h * d.a};
}

}  // namespace

double pulled_frequency(const EnergyLevels& levels, const CavitySpec& cavity, double gamma_u, double gamma_l,
                        double gamma_b) {
  const double total = gamma_u + gamma_l + gamma_b;
  if (!(total > 0.0)) throw ModelError("pulled_frequency: total rate must be positive");
  return ((gamma_u + gamma_l) * cavity.omega_cav + gamma_b * levels.gap()) / total;
}

SystemSpec at_pulled_frequency(const SystemSpec& spec) {
  SystemSpec out = spec;
  out.drive.omega = pulled_frequency(spec.levels, spec.cavity, spec.upper.gamma, spec.lower.gamma, spec.bath.gamma_b);
  return out;
}

double saturation_coefficient(double gamma_u, double gamma_l, double delta) {
  const double gsum = gamma_u + gamma_l;
  return gsum * gsum / (gamma_u * gamma_l * (gsum * gsum / 4.0 + delta * delta));
}

LaserSolution solve_lasing(const SystemSpec& spec, const Occupations& occ) {
  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  const double gb = spec.bath.gamma_b;
  if (!(gu > 0.0 && gl > 0.0)) throw ModelError("solve_lasing: reservoir rates must be positive");
  if (!(gb > 0.0)) throw ModelError("solve_lasing: a lossless cavity has no stationary field");

  LaserSolution sol;
  sol.omega = pulled_frequency(spec.levels, spec.cavity, gu, gl, gb);
  const double delta = detuning(spec.levels, sol.omega);
  sol.a_coefficient = (sol.omega - spec.cavity.omega_cav) * delta - gb * (gu + gl) / 4.0;

  const double g2 = std::norm(spec.cavity.g);
  const double inversion = occ.f_u - occ.f_l;
  sol.threshold_inversion = g2 > 0.0 ? -sol.a_coefficient / g2 : std::numeric_limits<double>::infinity();

  // A < 0 always, so a stationary field needs |g|^2 (f_u - f_l) > -A, which
  // fixes H = -A / (|g|^2 (f_u - f_l)) in (0, 1).
  const double gain = g2 * inversion;
  if (gain > -sol.a_coefficient) {
    const double s = saturation_coefficient(gu, gl, delta);
    const double x = (gain / -sol.a_coefficient - 1.0) / s;
    sol.intensity = x / g2;
    sol.a_ss = std::sqrt(sol.intensity);
    sol.above_threshold = true;
    sol.sigma_ul_ss = Complex(sol.omega - spec.cavity.omega_cav, gb / 2.0) * spec.cavity.g * sol.a_ss / g2;
  }
  return sol;
}

MeanFieldState meanfield_rhs(const MeanFieldState& s, const SystemSpec& spec, const Occupations& occ) {
  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  const double gb = spec.bath.gamma_b;
  const Complex g = spec.cavity.g;
  const double omega = pulled_frequency(spec.levels, spec.cavity, gu, gl, gb);
  const double delta = detuning(spec.levels, omega);

  // Y ~ g^* a^* sigma_ul; the populations exchange R = 2 Im Y.
  const Complex y = std::conj(g) * std::conj(s.a) * s.sigma_ul;
  const double exchange = (kI * (y - std::conj(y))).real();

  MeanFieldState d;
  d.sigma_uu = gu * (occ.f_u - s.sigma_uu) + exchange;
  d.sigma_ll = gl * (occ.f_l - s.sigma_ll) - exchange;
  d.sigma_ul = kI * delta * s.sigma_ul + kI * g * s.a * (s.sigma_uu - s.sigma_ll) - 0.5 * (gu + gl) * s.sigma_ul;
  d.a = kI * (omega - spec.cavity.omega_cav) * s.a - kI * std::conj(g) * s.sigma_ul - 0.5 * gb * s.a;
  return d;
}

MeanFieldTrajectory evolve_meanfield(const MeanFieldState& state0, const SystemSpec& spec, const Occupations& occ,
                                     const MeanFieldOptions& options) {
  const double omega = pulled_frequency(spec.levels, spec.cavity, spec.upper.gamma, spec.lower.gamma,
                                        spec.bath.gamma_b);
  const double fastest = std::max({spec.upper.gamma, spec.lower.gamma, spec.bath.gamma_b,
                                   std::abs(detuning(spec.levels, omega)),
                                   std::abs(omega - spec.cavity.omega_cav), std::abs(spec.cavity.g)});
  const double dt = options.dt > 0.0 ? options.dt : 0.02 / fastest;
  if (!(options.t_final >= 0.0)) throw ModelError("evolve_meanfield: t_final must be non-negative");
  const auto steps = static_cast<std::size_t>(std::ceil(options.t_final / dt - 1e-9));
  const double h = steps > 0 ? options.t_final / static_cast<double>(steps) : 0.0;
  const std::size_t every = std::max<std::size_t>(options.record_every, 1);

  MeanFieldTrajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(state0);
  MeanFieldState s = state0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const MeanFieldState k1 = meanfield_rhs(s, spec, occ);
    const MeanFieldState k2 = meanfield_rhs(axpy(s, 0.5 * h, k1), spec, occ);
    const MeanFieldState k3 = meanfield_rhs(axpy(s, 0.5 * h, k2), spec, occ);
    const MeanFieldState k4 = meanfield_rhs(axpy(s, h, k3), spec, occ);
    s.sigma_uu += h / 6.0 * (k1.sigma_uu + 2.0 * k2.sigma_uu + 2.0 * k3.sigma_uu + k4.sigma_uu);
    s.sigma_ll += h / 6.0 * (k1.sigma_ll + 2.0 * k2.sigma_ll + 2.0 * k3.sigma_ll + k4.sigma_ll);
    s.sigma_ul += h / 6.0 * (k1.sigma_ul + 2.0 * k2.sigma_ul + 2.0 * k3.sigma_ul + k4.sigma_ul);
    s.a += h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a);
    if (!(std::abs(s.a) < 1e6)) {
      std::ostringstream msg;
      msg << "evolve_meanfield: field diverged at t=" << h * static_cast<double>(n);
      throw SolverError(msg.str(), std::abs(s.a));
    }
    if (n % every == 0 || n == steps) {
      traj.times.push_back(h * static_cast<double>(n));
      traj.states.push_back(s);
    }
  }
  return traj;
}

}  // namespace tlsthermo
