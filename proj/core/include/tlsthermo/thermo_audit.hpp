#pragma once

// First/second-law bookkeeping on top of a FluxReport, regime classification
// (LED, solar cell, Carnot bound), and reproducible parameter sweeps.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlsthermo/flux_report.hpp"
#include "tlsthermo/model.hpp"
#include "tlsthermo/quantum.hpp"

namespace tlsthermo {

enum class Regime { Emission, Absorption, Idle };

const char* to_string(Regime regime);

struct EntropyReport {
  double s_dot_u = 0.0;
  double s_dot_l = 0.0;
  double s_dot_b = 0.0;  // zero for the classical field
  double total = 0.0;
  double law1_residual = 0.0;
  Regime regime = Regime::Idle;
};

Regime regime_of(double rate);

EntropyReport entropy_report(const FluxReport& flux, const SystemSpec& spec);

struct RegimeCheck {
  Regime regime = Regime::Idle;
  // Sign law: classical sign(R) = sign(mu_u - mu_l - omega); quantum
  // sign(R) = sign(mu_u - mu_l - E~ph (1 - T / T_b)). Applies when T_u = T_l
  // and every occupation is thermal at the effective energy.
  bool sign_law_applicable = false;
  bool sign_law_ok = true;
  double sign_argument = 0.0;
  // Quantum absorption with T_b > T: P_el <= Edot_b (T_b - T) / T_b.
  bool carnot_applicable = false;
  bool carnot_ok = true;
  double electrical_power = 0.0;
  double carnot_limit = 0.0;
  // Quantum emission with bias below the effective photon energy.
  bool electroluminescent_cooling = false;

  bool ok() const { return sign_law_ok && carnot_ok; }
};

RegimeCheck classify_regime(const FluxReport& flux, const SystemSpec& spec);

inline constexpr double kViolationTolerance = 1e-10;

struct AuditOptions {
  Treatment treatment = Treatment::Classical;
  double tolerance = kViolationTolerance;
  QuantumSolveOptions quantum{};
};

// Everything known about one audited scenario.
struct AuditRecord {
  SystemSpec spec{};
  std::optional<Occupations> occupations;
  std::optional<FluxReport> flux;
  std::optional<EntropyReport> entropy;
  std::optional<RegimeCheck> regime;
  std::optional<QuantumObservables> quantum;
  std::optional<SignCheck> sign;
  int fock_cutoff_used = 0;
  bool violation = false;
  // Empty on success; otherwise the solver or model error message.
  std::string error;
  bool convergence_failure = false;
};

// Solves the steady state in the requested treatment and audits it. Solver
// and model errors are captured in the record, not thrown.
AuditRecord audit_point(const SystemSpec& spec, const AuditOptions& options);

struct ParameterRange {
  std::string key;
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;  // grid points; ignored by the random sampler
};

enum class Sampler { Grid, UniformRandom };

struct SweepPlan {
  std::vector<ParameterRange> ranges;
  Sampler sampler = Sampler::Grid;
  std::uint64_t seed = 0;
  std::size_t samples = 0;  // random sampler only
};

struct SweepResult {
  std::size_t sample_id = 0;
  std::vector<std::pair<std::string, double>> parameters;
  AuditRecord record;
};

// Parameter assignments in sample order. Grid: Cartesian product with the
// last range varying fastest. Random: each range drawn uniformly from a
// 64-bit Mersenne Twister seeded with plan.seed, in range order.
std::vector<std::vector<std::pair<std::string, double>>> sample_parameters(const SweepPlan& plan);

// Deterministic for a given template and plan; results are ordered by sample id.
std::vector<SweepResult> sweep(const SystemSpec& scenario, const SweepPlan& plan, const AuditOptions& options);

struct ViolationSearch {
  std::optional<SweepResult> bare;       // first violating sample
  std::optional<SweepResult> effective;  // same parameters, effective energies
  std::size_t samples_tried = 0;
};

// Random search with every reservoir set to thermal-at-bare-energy.
ViolationSearch find_violation_with_bare_energies(const SystemSpec& scenario, const std::vector<ParameterRange>& ranges,
                                                  std::uint64_t seed, std::size_t budget,
                                                  const AuditOptions& options);

SystemSpec with_all_occupations(SystemSpec spec, const OccupationSpec& occupation);

}  // namespace tlsthermo
