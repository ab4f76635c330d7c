#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tlsthermo/errors.hpp"
#include "tlsthermo/quantum.hpp"

namespace tlsthermo {
namespace {

constexpr Complex kI{0.0, 1.0};

SystemSpec cavity_spec(int cutoff = 10) {
  SystemSpec s;
  s.levels = {1.0, 0.0};
  s.cavity = {1.1, {0.1, 0.0}, cutoff};
  s.upper.gamma = 0.5;
  s.lower.gamma = 0.4;
  s.bath.gamma_b = 0.6;
  s.upper.temperature = s.lower.temperature = 0.2;
  s.bath.temperature = 0.3;
  return s;
}

const Occupations kOcc{0.7, 0.2, 0.05};

DenseMatrix random_density(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  DenseMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
  DenseMatrix rho = m * m.adjoint();
  return rho / rho.trace();
}

double max_abs(const DenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Photon number basis and Jordan-Wigner signs built directly from the basis
// labels, without going through the library's tensor products.
DenseMatrix label_operator(const HilbertLayout& lay, char which) {
  const int d = lay.dim();
  DenseMatrix op = DenseMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const auto l = lay.labels(j);
    if (which == 'a' && l.n_photon > 0) {
      op(lay.index(l.n_lower, l.n_upper, l.n_photon - 1), j) = std::sqrt(double(l.n_photon));
    } else if (which == 'u' && l.n_upper == 1) {
      const double sign = lay.ordering() == FermionOrdering::LowerFirst && l.n_lower == 1 ? -1.0 : 1.0;
      op(lay.index(l.n_lower, 0, l.n_photon), j) = sign;
    } else if (which == 'l' && l.n_lower == 1) {
      const double sign = lay.ordering() == FermionOrdering::UpperFirst && l.n_upper == 1 ? -1.0 : 1.0;
      op(lay.index(0, l.n_upper, l.n_photon), j) = sign;
    }
  }
  return op;
}

TEST(Operators, MatchLabelConstruction) {
  for (auto ord : {FermionOrdering::LowerFirst, FermionOrdering::UpperFirst}) {
    const HilbertLayout lay(5, ord);
    const auto ops = build_operators(lay, cavity_spec(5));
    EXPECT_EQ(max_abs(ops.a - label_operator(lay, 'a')), 0.0);
    EXPECT_EQ(max_abs(ops.c_u - label_operator(lay, 'u')), 0.0);
    EXPECT_EQ(max_abs(ops.c_l - label_operator(lay, 'l')), 0.0);
  }
}

TEST(Operators, CanonicalRelations) {
  for (auto ord : {FermionOrdering::LowerFirst, FermionOrdering::UpperFirst}) {
    const HilbertLayout lay(6, ord);
    const auto ops = build_operators(lay, cavity_spec(6));
    const DenseMatrix id = DenseMatrix::Identity(lay.dim(), lay.dim());
    auto anti = [](const DenseMatrix& x, const DenseMatrix& y) { return DenseMatrix(x * y + y * x); };
    EXPECT_LT(max_abs(anti(ops.c_u, ops.c_u_dag) - id), 1e-15);
    EXPECT_LT(max_abs(anti(ops.c_l, ops.c_l_dag) - id), 1e-15);
    EXPECT_LT(max_abs(anti(ops.c_u, ops.c_l)), 1e-15);
    EXPECT_LT(max_abs(anti(ops.c_u, ops.c_l_dag)), 1e-15);
    EXPECT_LT(max_abs(anti(ops.c_u, ops.c_u)), 1e-15);
    EXPECT_LT(max_abs(DenseMatrix(ops.a * ops.c_u - ops.c_u * ops.a)), 1e-15);
    // [a, a^dag] = 1 except on the truncated top level.
    const DenseMatrix comm = ops.a * ops.a_dag - ops.a_dag * ops.a;
    for (int i = 0; i < lay.dim(); ++i) {
      const bool top = lay.labels(i).n_photon == lay.fock_cutoff();
      EXPECT_NEAR(comm(i, i).real(), top ? -double(lay.fock_cutoff()) : 1.0, 1e-14);
    }
  }
}

TEST(Operators, HamiltonianIsHermitianAndVacuumHasZeroEnergy) {
  SystemSpec s = cavity_spec(6);
  s.cavity.g = {0.07, -0.04};
  const HilbertLayout lay(6);
  const auto ops = build_operators(lay, s);
  EXPECT_LT(max_abs(DenseMatrix(ops.h_s - ops.h_s.adjoint())), 1e-15);
  const int vac = lay.index(0, 0, 0);
  EXPECT_EQ(std::abs(ops.h_s(vac, vac)), 0.0);
  const int one = lay.index(1, 0, 1);
  EXPECT_NEAR(ops.h_s(one, one).real(), s.levels.e_lower + s.cavity.omega_cav, 1e-15);
}

// Right-hand side written out term by term on the label operators.
DenseMatrix oracle_generator(const DenseMatrix& rho, const HilbertLayout& lay, const SystemSpec& s,
                             const Occupations& o) {
  const DenseMatrix a = label_operator(lay, 'a');
  const DenseMatrix cu = label_operator(lay, 'u');
  const DenseMatrix cl = label_operator(lay, 'l');
  const DenseMatrix h = s.levels.e_upper * cu.adjoint() * cu + s.levels.e_lower * cl.adjoint() * cl +
                        s.cavity.omega_cav * a.adjoint() * a + s.cavity.g * cu.adjoint() * cl * a +
                        std::conj(s.cavity.g) * cl.adjoint() * cu * a.adjoint();
  auto d = [&](const DenseMatrix& x) {
    return DenseMatrix(x * rho * x.adjoint() - 0.5 * x.adjoint() * x * rho - 0.5 * rho * x.adjoint() * x);
  };
  DenseMatrix out = -kI * (h * rho - rho * h);
  out += s.upper.gamma * (o.f_u * d(cu.adjoint()) + (1.0 - o.f_u) * d(cu));
  out += s.lower.gamma * (o.f_l * d(cl.adjoint()) + (1.0 - o.f_l) * d(cl));
  out += s.bath.gamma_b * ((o.n_b + 1.0) * d(a) + o.n_b * d(a.adjoint()));
  return out;
}

TEST(Liouvillian, MatchesTermByTermOracle) {
  SystemSpec s = cavity_spec(4);
  s.cavity.g = {0.13, 0.05};
  for (auto ord : {FermionOrdering::LowerFirst, FermionOrdering::UpperFirst}) {
    const HilbertLayout lay(4, ord);
    const auto ops = build_operators(lay, s);
    const auto l = build_liouvillian(lay, ops, s, kOcc);
    const DenseMatrix rho = random_density(lay.dim(), 21);
    const DenseMatrix expected = oracle_generator(rho, lay, s, kOcc);
    const ComplexVector v = l.matrix * Eigen::Map<const ComplexVector>(rho.data(), rho.size());
    const DenseMatrix got = Eigen::Map<const DenseMatrix>(v.data(), lay.dim(), lay.dim());
    EXPECT_LT(max_abs(got - expected), 1e-13);
    EXPECT_LT(max_abs(apply_generator(rho, ops, s, kOcc) - expected), 1e-13);
  }
}

TEST(Liouvillian, PreservesTraceAndHermiticity) {
  const SystemSpec s = cavity_spec(5);
  const HilbertLayout lay(5);
  const auto ops = build_operators(lay, s);
  for (auto frame : {Frame::Lab, Frame::Interaction}) {
    const auto l = build_liouvillian(lay, ops, s, kOcc, frame);
    const DenseMatrix rho = random_density(lay.dim(), 4);
    const ComplexVector v = l.matrix * Eigen::Map<const ComplexVector>(rho.data(), rho.size());
    const DenseMatrix drho = Eigen::Map<const DenseMatrix>(v.data(), lay.dim(), lay.dim());
    EXPECT_LT(std::abs(drho.trace()), 1e-13);
    EXPECT_LT(max_abs(DenseMatrix(drho - drho.adjoint())), 1e-13);
  }
}

TEST(SteadyState, DecoupledProductState) {
  SystemSpec s = cavity_spec(12);
  s.cavity.g = {0.0, 0.0};
  const auto sol = solve_quantum_steady_state(s, {0.7, 0.2, 0.3});
  const auto o = observables(sol.state.rho, sol.ops, s);
  EXPECT_NEAR(o.sigma_uu, 0.7, 1e-12);
  EXPECT_NEAR(o.sigma_ll, 0.2, 1e-12);
  EXPECT_NEAR(o.n_ph, 0.3, 1e-6);
  EXPECT_EQ(o.y, Complex(0.0, 0.0));
  EXPECT_NEAR(o.f_exact, o.f_hf, 1e-12);
  EXPECT_NEAR(o.f_exact, 0.7 * 0.8 + 0.5 * o.n_ph, 1e-12);
  // Geometric photon distribution with ratio n_b / (1 + n_b), normalized on
  // the truncated ladder.
  const double r = 0.3 / 1.3;
  const double p2 = r * r * (1.0 - r) / (1.0 - std::pow(r, sol.layout.fock_cutoff() + 1));
  const int idx = sol.layout.index(0, 1, 2);
  EXPECT_NEAR(sol.state.rho(idx, idx).real(), 0.8 * 0.7 * p2, 1e-12);
}

TEST(SteadyState, AgreesWithLongTimeEvolution) {
  // Small ladder without tail refinement keeps the RK4 run short.
  const SystemSpec s = cavity_spec(6);
  const Occupations occ{0.7, 0.2, 0.01};
  QuantumSolveOptions opt;
  opt.refine_tail = kFockTailTolerance;
  const auto sol = solve_quantum_steady_state(s, occ, opt);
  EXPECT_LT(sol.residual, 1e-10);
  EXPECT_GE(sol.state.min_eigenvalue(), -1e-10);
  EXPECT_LE(sol.fock_tail, 1e-6);

  const auto l = build_liouvillian(sol.layout, sol.ops, s, occ, Frame::Interaction);
  const DenseMatrix id = DenseMatrix::Identity(sol.layout.dim(), sol.layout.dim());
  const QuantumState start{id / double(sol.layout.dim())};
  const auto late = evolve_quantum(start, l, {80.0, 0.0, 0});
  EXPECT_LT(max_abs(late.rho - sol.state.rho), 1e-8);

  // The rotating-frame generator shares the stationary state.
  EXPECT_LT(stationarity_residual(l, sol.state), 1e-10);
}

TEST(SteadyState, CutoffConvergence) {
  const SystemSpec s = cavity_spec(10);
  const auto coarse = solve_quantum_steady_state(s, kOcc);
  SystemSpec fine_spec = s;
  fine_spec.cavity.fock_cutoff = 2 * coarse.layout.fock_cutoff();
  const auto fine = solve_quantum_steady_state(fine_spec, kOcc);
  const auto a = observables(coarse.state.rho, coarse.ops, s);
  const auto b = observables(fine.state.rho, fine.ops, s);
  EXPECT_NEAR(a.rate, b.rate, 1e-8);
  EXPECT_NEAR(a.n_ph, b.n_ph, 1e-6);
  EXPECT_NEAR(a.sigma_uu, b.sigma_uu, 1e-8);
}

TEST(SteadyState, OrderingDoesNotChangeObservables) {
  SystemSpec s = cavity_spec(10);
  s.cavity.g = {0.08, 0.06};
  QuantumSolveOptions opt;
  const auto a = solve_quantum_steady_state(s, kOcc, opt);
  opt.ordering = FermionOrdering::UpperFirst;
  const auto b = solve_quantum_steady_state(s, kOcc, opt);
  const auto oa = observables(a.state.rho, a.ops, s);
  const auto ob = observables(b.state.rho, b.ops, s);
  EXPECT_NEAR(oa.rate, ob.rate, 1e-12);
  EXPECT_NEAR(std::abs(oa.y - ob.y), 0.0, 1e-12);
  EXPECT_NEAR(oa.n_ph, ob.n_ph, 1e-12);
  EXPECT_NEAR(oa.f_exact, ob.f_exact, 1e-12);
}

TEST(SteadyState, CutoffErrorWithoutExtension) {
  SystemSpec s = cavity_spec(2);
  QuantumSolveOptions opt;
  opt.auto_extend_cutoff = false;
  EXPECT_THROW(solve_quantum_steady_state(s, {0.7, 0.2, 1.0}, opt), CutoffError);
  opt.auto_extend_cutoff = true;
  const auto sol = solve_quantum_steady_state(s, {0.7, 0.2, 1.0}, opt);
  EXPECT_GT(sol.layout.fock_cutoff(), 2);
  EXPECT_LE(sol.fock_tail, 1e-6);
}

TEST(Observables, VacuumAndDenseTraceOracle) {
  const SystemSpec s = cavity_spec(4);
  const HilbertLayout lay(4);
  const auto ops = build_operators(lay, s);
  DenseMatrix vac = DenseMatrix::Zero(lay.dim(), lay.dim());
  vac(0, 0) = 1.0;
  const auto v = observables(vac, ops, s);
  EXPECT_EQ(v.sigma_uu, 0.0);
  EXPECT_EQ(v.n_ph, 0.0);
  EXPECT_EQ(v.rate, 0.0);
  EXPECT_EQ(v.f_exact, 0.0);

  const DenseMatrix rho = random_density(lay.dim(), 8);
  const auto o = observables(rho, ops, s);
  const DenseMatrix cu = label_operator(lay, 'u'), cl = label_operator(lay, 'l'), a = label_operator(lay, 'a');
  const Complex y = std::conj(s.cavity.g) * (cl.adjoint() * cu * a.adjoint() * rho).trace();
  EXPECT_NEAR(std::abs(o.y - y), 0.0, 1e-14);
  EXPECT_NEAR(o.rate, 2.0 * y.imag(), 1e-14);
  EXPECT_NEAR(o.n_ph, (a.adjoint() * a * rho).trace().real(), 1e-14);
}

SystemSpec random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemSpec s = cavity_spec(10);
  s.cavity.omega_cav = 0.7 + 0.6 * u(rng);
  s.cavity.g = std::polar(0.02 + 0.15 * u(rng), 6.28 * u(rng));
  s.upper.gamma = 0.1 + u(rng);
  s.lower.gamma = 0.1 + u(rng);
  s.bath.gamma_b = 0.1 + u(rng);
  return s;
}

TEST(Fluxes, StationarityRelationsAndEffectiveEnergies) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    const SystemSpec s = random_spec(rng);
    const Occupations occ{u(rng), u(rng), 0.3 * u(rng)};
    const auto sol = solve_quantum_steady_state(s, occ);
    const auto o = observables(sol.state.rho, sol.ops, s);
    const auto r = fluxes_quantum(sol.state.rho, sol.ops, s, occ);
    const double gtot = s.upper.gamma + s.lower.gamma + s.bath.gamma_b;
    const double dcav = s.cavity.omega_cav - s.levels.gap();

    EXPECT_NEAR(s.upper.gamma * (occ.f_u - o.sigma_uu), o.rate, 1e-10);
    EXPECT_NEAR(s.lower.gamma * (occ.f_l - o.sigma_ll), -o.rate, 1e-10);
    EXPECT_NEAR(s.bath.gamma_b * (occ.n_b - o.n_ph), -o.rate, 1e-10);
    EXPECT_NEAR(o.y.real(), -dcav * o.rate / gtot, 1e-10);
    EXPECT_NEAR(r.ndot_u, o.rate, 1e-10);
    EXPECT_NEAR(r.ndot_l, -o.rate, 1e-10);
    EXPECT_LT(std::abs(r.law1_residual), 1e-10);
    if (std::abs(o.rate) > 1e-6) {
      ASSERT_TRUE(r.measured.has_value());
      EXPECT_NEAR(r.measured->upper, r.predicted.upper, 1e-6);
      EXPECT_NEAR(r.measured->lower, r.predicted.lower, 1e-6);
      EXPECT_NEAR(r.measured->photon, r.predicted.photon, 1e-6);
    }
  }
}

TEST(Fluxes, RejectsNonStationaryState) {
  const SystemSpec s = cavity_spec(4);
  const HilbertLayout lay(4);
  const auto ops = build_operators(lay, s);
  EXPECT_THROW(fluxes_quantum(random_density(lay.dim(), 2), ops, s, kOcc), SolverError);
}

TEST(Observables, CouplingPhaseInvariance) {
  SystemSpec s = cavity_spec(10);
  const auto ref = solve_quantum_steady_state(s, kOcc);
  const auto o_ref = observables(ref.state.rho, ref.ops, s);
  s.cavity.g *= std::polar(1.0, 1.1);
  const auto rot = solve_quantum_steady_state(s, kOcc);
  const auto o = observables(rot.state.rho, rot.ops, s);
  EXPECT_NEAR(o.rate, o_ref.rate, 1e-12);
  EXPECT_NEAR(std::abs(o.y - o_ref.y), 0.0, 1e-12);
  EXPECT_NEAR(o.n_ph, o_ref.n_ph, 1e-12);
}

TEST(SignCondition, Examples) {
  QuantumObservables o;
  o.rate = 1e-3;
  // 0.5/0.5 - (0.2/0.8)(0.1/1.1) = 1 - 0.25/11
  auto c = sign_condition(o, {0.5, 0.2, 0.1});
  EXPECT_NEAR(c.rhs, 1.0 - 0.25 / 11.0, 1e-15);
  EXPECT_EQ(c.rhs_sign, 1);
  EXPECT_TRUE(c.agree);
  o.rate = -1e-3;
  c = sign_condition(o, {0.1, 0.9, 1.0});
  EXPECT_EQ(c.rhs_sign, -1);
  EXPECT_TRUE(c.agree);
  EXPECT_THROW(sign_condition(o, {1.0, 0.2, 0.1}), ModelError);
}

TEST(SignCondition, HoldsForSolvedStates) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    const SystemSpec s = random_spec(rng);
    const Occupations occ{0.95 * u(rng), 0.95 * u(rng), 0.4 * u(rng)};
    const auto sol = solve_quantum_steady_state(s, occ);
    const auto c = sign_condition(observables(sol.state.rho, sol.ops, s), occ);
    if (std::abs(c.rhs) < 1e-6) continue;
    EXPECT_TRUE(c.agree) << c.lhs_sign << " " << c.rhs;
  }
}

}  // namespace
}  // namespace tlsthermo
