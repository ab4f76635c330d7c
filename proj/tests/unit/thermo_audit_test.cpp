#include <gtest/gtest.h>

#include <cmath>

#include "tlsthermo/classical.hpp"
#include "tlsthermo/errors.hpp"
#include "tlsthermo/parameters.hpp"
#include "tlsthermo/thermo_audit.hpp"

namespace tlsthermo {
namespace {

SystemSpec scenario() {
  SystemSpec s;
  s.levels = {1.0, 0.0};
  s.drive = {1.2, {0.1, 0.0}};
  s.cavity = {1.2, {0.01, 0.0}, 12};
  s.upper = {0.2, OccupationSpec::effective(), 1.3, 0.2};
  s.lower = {0.3, OccupationSpec::effective(), -0.1, 0.2};
  s.bath = {0.25, OccupationSpec::effective(), 0.3};
  return s;
}

AuditOptions quantum_options() {
  AuditOptions o;
  o.treatment = Treatment::Quantum;
  return o;
}

TEST(EntropyReport, ClassicalIdentity) {
  const SystemSpec s = scenario();
  const auto rec = audit_point(s, {});
  ASSERT_TRUE(rec.error.empty()) << rec.error;
  const auto& f = *rec.flux;
  const double expected =
      f.rate * ((f.predicted.lower - s.lower.mu) / s.lower.temperature -
                (f.predicted.upper - s.upper.mu) / s.upper.temperature);
  EXPECT_NEAR(rec.entropy->total, expected, 1e-12);
  EXPECT_NEAR(rec.entropy->total, entropy_production_classical(f, s), 1e-12);
  EXPECT_EQ(rec.entropy->s_dot_b, 0.0);
  EXPECT_NEAR(rec.entropy->total, rec.entropy->s_dot_u + rec.entropy->s_dot_l, 1e-15);
  EXPECT_FALSE(rec.violation);
}

TEST(EntropyReport, QuantumIdentity) {
  SystemSpec s = scenario();
  s.bath.temperature = 0.4;
  const auto rec = audit_point(s, quantum_options());
  ASSERT_TRUE(rec.error.empty()) << rec.error;
  const auto& f = *rec.flux;
  const double expected = f.rate * (f.predicted.photon / s.bath.temperature +
                                    (f.predicted.lower - s.lower.mu) / s.lower.temperature -
                                    (f.predicted.upper - s.upper.mu) / s.upper.temperature);
  EXPECT_NEAR(rec.entropy->total, expected, 1e-9);
  EXPECT_GE(rec.entropy->total, -1e-10);
  EXPECT_LT(std::abs(f.law1_residual), 1e-9);
}

TEST(EntropyReport, ZeroRateAndBadTemperature) {
  FluxReport f;
  SystemSpec s = scenario();
  EXPECT_EQ(entropy_report(f, s).total, 0.0);
  EXPECT_EQ(entropy_report(f, s).regime, Regime::Idle);
  s.lower.temperature = 0.0;
  EXPECT_THROW(entropy_report(f, s), ModelError);
}

TEST(ClassifyRegime, ClassicalBiasAtPhotonEnergyIsIdle) {
  SystemSpec s = scenario();
  s.upper.mu = 1.2;
  s.lower.mu = 0.0;
  const auto rec = audit_point(s, {});
  ASSERT_TRUE(rec.error.empty());
  EXPECT_NEAR(rec.flux->rate, 0.0, 1e-12);
  EXPECT_TRUE(rec.regime->ok());
}

TEST(ClassifyRegime, LedSignLawOnGrid) {
  for (double bias : {-0.5, 0.3, 1.0, 1.19, 1.21, 1.6, 2.4}) {
    for (double delta : {-0.6, 0.0, 0.35}) {
      SystemSpec s = scenario();
      set_parameter(s, "delta", delta);
      s.upper.mu = bias;
      s.lower.mu = 0.0;
      const auto rec = audit_point(s, {});
      ASSERT_TRUE(rec.error.empty());
      ASSERT_TRUE(rec.regime->sign_law_applicable);
      EXPECT_TRUE(rec.regime->sign_law_ok) << bias << " " << delta;
      EXPECT_EQ(rec.regime->regime == Regime::Emission, bias > s.drive.omega);
    }
  }
}

TEST(ClassifyRegime, UnequalTemperaturesSkipSignLaw) {
  SystemSpec s = scenario();
  s.lower.temperature = 0.5;
  const auto rec = audit_point(s, {});
  EXPECT_FALSE(rec.regime->sign_law_applicable);
  EXPECT_FALSE(rec.regime->carnot_applicable);
}

TEST(ClassifyRegime, SolarCellRespectsCarnot) {
  SystemSpec s = scenario();
  s.cavity.omega_cav = 1.0;
  s.bath.temperature = 1.5;
  for (double bias : {0.0, 0.1, 0.3, 0.5}) {
    s.upper.mu = 0.5 + bias / 2.0;
    s.lower.mu = 0.5 - bias / 2.0;
    const auto rec = audit_point(s, quantum_options());
    ASSERT_TRUE(rec.error.empty()) << rec.error;
    ASSERT_EQ(rec.regime->regime, Regime::Absorption);
    ASSERT_TRUE(rec.regime->carnot_applicable);
    EXPECT_TRUE(rec.regime->carnot_ok);
    EXPECT_LE(rec.regime->electrical_power, rec.regime->carnot_limit + 1e-10);
    EXPECT_TRUE(rec.regime->sign_law_ok);
  }
}

TEST(ClassifyRegime, ElectroluminescentCooling) {
  SystemSpec s = scenario();
  s.cavity.omega_cav = 1.0;
  s.bath.temperature = 2.0;
  s.upper.temperature = s.lower.temperature = 0.1;
  // Bias below the photon energy yet above E~ph (1 - T/T_b) = 0.95.
  s.upper.mu = 0.5 + 0.49;
  s.lower.mu = 0.5 - 0.49;
  const auto rec = audit_point(s, quantum_options());
  ASSERT_TRUE(rec.error.empty()) << rec.error;
  EXPECT_EQ(rec.regime->regime, Regime::Emission);
  EXPECT_TRUE(rec.regime->electroluminescent_cooling);
  EXPECT_TRUE(rec.regime->sign_law_ok);
}

TEST(AuditPoint, CapturesModelErrors) {
  SystemSpec s = scenario();
  s.upper.gamma = -1.0;
  const auto rec = audit_point(s, {});
  EXPECT_FALSE(rec.error.empty());
  EXPECT_FALSE(rec.convergence_failure);
  EXPECT_FALSE(rec.flux.has_value());
}

TEST(Sweep, GridOrderAndSingleton) {
  SweepPlan plan;
  plan.ranges = {{"delta", -0.2, 0.2, 3}, {"T", 0.1, 0.3, 2}};
  const auto pts = sample_parameters(plan);
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0][0].first, "delta");
  EXPECT_DOUBLE_EQ(pts[1][1].second, 0.3);
  EXPECT_DOUBLE_EQ(pts[2][0].second, 0.0);

  SweepPlan one;
  one.ranges = {{"mu_u", 1.4, 1.4, 1}};
  const auto res = sweep(scenario(), one, {});
  ASSERT_EQ(res.size(), 1u);
  SystemSpec direct = scenario();
  direct.upper.mu = 1.4;
  const auto rec = audit_point(direct, {});
  EXPECT_EQ(res[0].record.entropy->total, rec.entropy->total);
  EXPECT_EQ(res[0].record.flux->rate, rec.flux->rate);

  plan.ranges.push_back({"nonsense", 0.0, 1.0, 2});
  EXPECT_THROW(sample_parameters(plan), ModelError);
}

TEST(Sweep, RandomSamplerIsDeterministic) {
  SweepPlan plan{{{"delta", -1.0, 1.0, 0}, {"mu_u", -1.0, 2.0, 0}}, Sampler::UniformRandom, 1234, 50};
  const auto a = sample_parameters(plan);
  const auto b = sample_parameters(plan);
  EXPECT_EQ(a, b);
  plan.seed = 1235;
  EXPECT_NE(a, sample_parameters(plan));
  for (const auto& p : a) {
    EXPECT_GE(p[0].second, -1.0);
    EXPECT_LT(p[0].second, 1.0);
  }
}

TEST(Sweep, EffectiveEnergiesNeverViolate) {
  SweepPlan plan{{{"delta", -1.0, 1.0, 0},
                  {"T_u", 0.05, 0.5, 0},
                  {"T_l", 0.05, 0.5, 0},
                  {"mu_u", -1.0, 2.0, 0},
                  {"mu_l", -1.0, 2.0, 0},
                  {"gamma_u", 0.05, 0.5, 0},
                  {"gamma_l", 0.05, 0.5, 0}},
                 Sampler::UniformRandom,
                 99,
                 1000};
  for (const auto& r : sweep(scenario(), plan, {})) {
    ASSERT_TRUE(r.record.error.empty());
    EXPECT_FALSE(r.record.violation);
    EXPECT_LT(std::abs(r.record.flux->law1_residual), 1e-9 * std::max(1.0, std::abs(r.record.flux->rate)));
  }
}

TEST(FindViolation, ResonantSubspaceHasNone) {
  const std::vector<ParameterRange> ranges = {{"T_u", 0.05, 0.5, 0}, {"T_l", 0.05, 0.5, 0},
                                              {"mu_u", -1.0, 2.0, 0}, {"mu_l", -1.0, 2.0, 0}};
  SystemSpec s = scenario();
  s.drive.omega = s.levels.gap();
  const auto search = find_violation_with_bare_energies(s, ranges, 5, 2000, {});
  EXPECT_FALSE(search.bare.has_value());
  EXPECT_EQ(search.samples_tried, 2000u);
}

TEST(FindViolation, BareEnergiesViolateAndEffectiveRepair) {
  const std::vector<ParameterRange> ranges = {
      {"delta", -1.0, 1.0, 0}, {"T_u", 0.05, 0.5, 0},     {"T_l", 0.05, 0.5, 0},     {"mu_u", -1.0, 2.0, 0},
      {"mu_l", -1.0, 2.0, 0},  {"gamma_u", 0.05, 0.5, 0}, {"gamma_l", 0.05, 0.5, 0},
  };
  const auto search = find_violation_with_bare_energies(scenario(), ranges, 7, 20000, {});
  ASSERT_TRUE(search.bare.has_value());
  EXPECT_LT(search.bare->record.entropy->total, -1e-10);
  ASSERT_TRUE(search.effective.has_value());
  EXPECT_GE(search.effective->record.entropy->total, -1e-10);

  // Reproducible from the stored parameters.
  SystemSpec again = with_all_occupations(scenario(), OccupationSpec::bare());
  for (const auto& [k, v] : search.bare->parameters) set_parameter(again, k, v);
  EXPECT_EQ(audit_point(again, {}).entropy->total, search.bare->record.entropy->total);
}

}  // namespace
}  // namespace tlsthermo
