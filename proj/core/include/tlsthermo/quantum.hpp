#pragma once

// Two fermionic levels coupled to one cavity mode (Jaynes-Cummings form)
// with local Lindblad dissipators for the two electron reservoirs and the
// bosonic bath, on a truncated fermion x Fock space.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>

#include "tlsthermo/flux_report.hpp"
#include "tlsthermo/model.hpp"

namespace tlsthermo {

using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using ComplexVector = Eigen::VectorXcd;

// Which fermion mode carries no Jordan-Wigner string.
enum class FermionOrdering { LowerFirst, UpperFirst };

// Basis |n_l n_u> (x) |n_ph>, flattened as (2*n_l + n_u)*(N+1) + n_ph.
class HilbertLayout {
 public:
  struct Labels {
    int n_lower;
    int n_upper;
    int n_photon;
  };

  explicit HilbertLayout(int fock_cutoff, FermionOrdering ordering = FermionOrdering::LowerFirst);

  int fock_cutoff() const { return fock_cutoff_; }
  int photon_dim() const { return fock_cutoff_ + 1; }
  static constexpr int fermion_dim() { return 4; }
  int dim() const { return fermion_dim() * photon_dim(); }
  FermionOrdering ordering() const { return ordering_; }

  int index(int n_lower, int n_upper, int n_photon) const;
  Labels labels(int index) const;

 private:
  int fock_cutoff_;
  FermionOrdering ordering_;
};

struct OperatorSet {
  DenseMatrix c_u, c_l, c_u_dag, c_l_dag;
  DenseMatrix a, a_dag;
  DenseMatrix n_u, n_l, n_ph;
  DenseMatrix h_s;  // H_0 + V_JC + omega_cav a^dag a
};

OperatorSet build_operators(const HilbertLayout& layout, const SystemSpec& spec);

// Lab: coherent part generated by H_S itself.
// Interaction: H_S - omega_cav (n_u + n_ph) - E_l (n_u + n_l). Both number
// combinations commute with H_S and every dissipator, so stationary states
// coincide while the generator norm no longer grows with the bare energies.
enum class Frame { Lab, Interaction };

struct Liouvillian {
  HilbertLayout layout;
  Frame frame = Frame::Lab;
  // Acts on column-stacked density matrices: vec(rho)[i + j*D] = rho(i, j).
  SparseMatrix matrix;

  double inf_norm() const;
};

Liouvillian build_liouvillian(const HilbertLayout& layout, const OperatorSet& ops, const SystemSpec& spec,
                              const Occupations& occ, Frame frame = Frame::Lab);

// Direct evaluation of the master-equation right-hand side with dense
// operators, optionally restricted to one dissipative channel.
enum class Channel { All, Coherent, Upper, Lower, Bath };
DenseMatrix apply_generator(const DenseMatrix& rho, const OperatorSet& ops, const SystemSpec& spec,
                            const Occupations& occ, Channel channel = Channel::All);

struct QuantumState {
  DenseMatrix rho;

  double trace_deviation() const;
  double hermiticity_deviation() const;
  double min_eigenvalue() const;
  // Population in the two highest photon-number states.
  double fock_tail(const HilbertLayout& layout) const;
};

inline constexpr double kQuantumResidualTolerance = 1e-10;
inline constexpr double kFockTailTolerance = 1e-6;

// Null-space solve with one population equation replaced by Tr(rho) = 1.
// Throws SolverError on residual or positivity failure, CutoffError when the
// Fock tail exceeds kFockTailTolerance.
QuantumState steady_state(const Liouvillian& liouvillian);

double stationarity_residual(const Liouvillian& liouvillian, const QuantumState& state);

struct QuantumEvolveOptions {
  double t_final = 100.0;
  // Zero selects 0.05 / ||L||_inf.
  double dt = 0.0;
  // Observer cadence in steps; zero disables observation.
  std::size_t observe_every = 0;
};

using QuantumObserver = std::function<void(double t, const QuantumState& state)>;

// Fixed-step RK4 on vec(rho). Trace and Hermiticity are monitored and a
// drift above 1e-9 aborts with SolverError.
QuantumState evolve_quantum(const QuantumState& rho0, const Liouvillian& liouvillian,
                            const QuantumEvolveOptions& options, const QuantumObserver& observer = {});

struct QuantumObservables {
  double sigma_uu = 0.0;
  double sigma_ll = 0.0;
  double n_ph = 0.0;
  Complex y{0.0, 0.0};  // g^* Tr{c_l^dag c_u a^dag rho}
  double f_exact = 0.0;
  double f_hf = 0.0;  // Hartree-Fock factorized F
  double rate = 0.0;  // 2 Im Y
};

QuantumObservables observables(const DenseMatrix& rho, const OperatorSet& ops, const SystemSpec& spec);

// Flows from the reservoirs; numeric traces Tr{H_S L_alpha[rho]} are checked
// against the closed forms in terms of (sigma, n_ph, Y).
FluxReport fluxes_quantum(const DenseMatrix& rho_ss, const OperatorSet& ops, const SystemSpec& spec,
                          const Occupations& occ);

struct SignCheck {
  int lhs_sign = 0;  // sign of the exact R^ss, dead band kRateDeadBand
  int rhs_sign = 0;  // sign of f_u/(1-f_u) - f_l/(1-f_l) * n_b/(1+n_b)
  double rhs = 0.0;
  bool agree = false;
};

SignCheck sign_condition(const QuantumObservables& obs, const Occupations& occ);

struct QuantumSolveOptions {
  // Increase the cutoff by `cutoff_step` until the tail check passes.
  bool auto_extend_cutoff = true;
  int cutoff_step = 4;
  int max_fock_cutoff = 48;
  // Past the hard tail check, keep extending while the tail is above this and
  // the cutoff budget allows. Truncation shifts the closed-form flux
  // relations by roughly (N+1) times the top-level population.
  double refine_tail = 1e-12;
  FermionOrdering ordering = FermionOrdering::LowerFirst;
};

struct QuantumSolution {
  HilbertLayout layout{1};
  OperatorSet ops;
  QuantumState state;
  double residual = 0.0;
  double fock_tail = 0.0;
};

// build_operators + build_liouvillian + steady_state with cutoff retries.
QuantumSolution solve_quantum_steady_state(const SystemSpec& spec, const Occupations& occ,
                                           const QuantumSolveOptions& options = {});

}  // namespace tlsthermo
