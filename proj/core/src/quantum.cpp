#include "tlsthermo/quantum.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "tlsthermo/errors.hpp"

namespace tlsthermo {
namespace {

constexpr Complex kI{0.0, 1.0};

using Triplet = Eigen::Triplet<Complex>;

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Appends rate * (A (x) B) to the triplet list.
void add_kron(std::vector<Triplet>& out, const SparseMatrix& a, const SparseMatrix& b, Complex rate) {
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
          out.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                           static_cast<int>(ia.col() * b.cols() + ib.col()), rate * ia.value() * ib.value());
        }
      }
    }
  }
}

SparseMatrix to_sparse(const DenseMatrix& m) { return m.sparseView(0.0, 0.0); }

// rate * D_sigma in superoperator form.
void add_dissipator(std::vector<Triplet>& out, const DenseMatrix& sigma, double rate) {
  if (rate == 0.0) return;
  const Eigen::Index d = sigma.rows();
  const SparseMatrix s = to_sparse(sigma);
  const SparseMatrix s_conj = to_sparse(sigma.conjugate());
  const SparseMatrix sds = to_sparse(sigma.adjoint() * sigma);
  const SparseMatrix sds_t = to_sparse((sigma.adjoint() * sigma).transpose());
  SparseMatrix id(d, d);
  id.setIdentity();
  add_kron(out, s_conj, s, rate);
  add_kron(out, id, sds, -0.5 * rate);
  add_kron(out, sds_t, id, -0.5 * rate);
}

DenseMatrix dissipator(const DenseMatrix& sigma, const DenseMatrix& rho) {
  const DenseMatrix sds = sigma.adjoint() * sigma;
  return sigma * rho * sigma.adjoint() - 0.5 * (sds * rho + rho * sds);
}

Complex trace_product(const DenseMatrix& a, const DenseMatrix& rho) {
  return a.cwiseProduct(rho.transpose()).sum();
}

DenseMatrix coherent_hamiltonian(const OperatorSet& ops, const SystemSpec& spec, Frame frame) {
  if (frame == Frame::Lab) return ops.h_s;
  return ops.h_s - spec.cavity.omega_cav * (ops.n_u + ops.n_ph) - spec.levels.e_lower * (ops.n_u + ops.n_l);
}

ComplexVector vectorize(const DenseMatrix& rho) {
  return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

DenseMatrix unvectorize(const ComplexVector& v, Eigen::Index d) {
  return Eigen::Map<const DenseMatrix>(v.data(), d, d);
}

}  // namespace

HilbertLayout::HilbertLayout(int fock_cutoff, FermionOrdering ordering)
    : fock_cutoff_(fock_cutoff), ordering_(ordering) {
  if (fock_cutoff < 1) throw ModelError("HilbertLayout: fock_cutoff must be >= 1");
}

int HilbertLayout::index(int n_lower, int n_upper, int n_photon) const {
  return (2 * n_lower + n_upper) * photon_dim() + n_photon;
}

HilbertLayout::Labels HilbertLayout::labels(int index) const {
  const int f = index / photon_dim();
  return {f / 2, f % 2, index % photon_dim()};
}

OperatorSet build_operators(const HilbertLayout& layout, const SystemSpec& spec) {
  DenseMatrix lower(2, 2), parity(2, 2), id2 = DenseMatrix::Identity(2, 2);
  lower << 0.0, 1.0, 0.0, 0.0;
  parity << 1.0, 0.0, 0.0, -1.0;

  // Two-mode fermion operators on |n_l n_u>.
  DenseMatrix cl4, cu4;
  if (layout.ordering() == FermionOrdering::LowerFirst) {
    cl4 = kron(lower, id2);
    cu4 = kron(parity, lower);
  } else {
    cu4 = kron(id2, lower);
    cl4 = kron(lower, parity);
  }

  const int np = layout.photon_dim();
  DenseMatrix a_n = DenseMatrix::Zero(np, np);
  for (int n = 1; n < np; ++n) a_n(n - 1, n) = std::sqrt(static_cast<double>(n));
  const DenseMatrix id_ph = DenseMatrix::Identity(np, np);
  const DenseMatrix id_f = DenseMatrix::Identity(4, 4);

  OperatorSet ops;
  ops.c_u = kron(cu4, id_ph);
  ops.c_l = kron(cl4, id_ph);
  ops.a = kron(id_f, a_n);
  ops.c_u_dag = ops.c_u.adjoint();
  ops.c_l_dag = ops.c_l.adjoint();
  ops.a_dag = ops.a.adjoint();
  ops.n_u = ops.c_u_dag * ops.c_u;
  ops.n_l = ops.c_l_dag * ops.c_l;
  ops.n_ph = ops.a_dag * ops.a;

  const Complex g = spec.cavity.g;
  ops.h_s = spec.levels.e_upper * ops.n_u + spec.levels.e_lower * ops.n_l + spec.cavity.omega_cav * ops.n_ph +
            g * ops.c_u_dag * ops.c_l * ops.a + std::conj(g) * ops.c_l_dag * ops.c_u * ops.a_dag;
  return ops;
}

double Liouvillian::inf_norm() const {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(matrix.rows());
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) row_sums(it.row()) += std::abs(it.value());
  }
  return row_sums.maxCoeff();
}

Liouvillian build_liouvillian(const HilbertLayout& layout, const OperatorSet& ops, const SystemSpec& spec,
                              const Occupations& occ, Frame frame) {
  const int d = layout.dim();
  std::vector<Triplet> triplets;

  SparseMatrix id(d, d);
  id.setIdentity();
  const DenseMatrix h = coherent_hamiltonian(ops, spec, frame);
  add_kron(triplets, id, to_sparse(h), -kI);
  add_kron(triplets, to_sparse(h.transpose()), id, kI);

  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  const double gb = spec.bath.gamma_b;
  add_dissipator(triplets, ops.c_u_dag, gu * occ.f_u);
  add_dissipator(triplets, ops.c_u, gu * (1.0 - occ.f_u));
  add_dissipator(triplets, ops.c_l_dag, gl * occ.f_l);
  add_dissipator(triplets, ops.c_l, gl * (1.0 - occ.f_l));
  add_dissipator(triplets, ops.a, gb * (occ.n_b + 1.0));
  add_dissipator(triplets, ops.a_dag, gb * occ.n_b);

  Liouvillian l{layout, frame, SparseMatrix(d * d, d * d)};
  l.matrix.setFromTriplets(triplets.begin(), triplets.end());
  l.matrix.prune(Complex(0.0, 0.0));
  l.matrix.makeCompressed();
  return l;
}

DenseMatrix apply_generator(const DenseMatrix& rho, const OperatorSet& ops, const SystemSpec& spec,
                            const Occupations& occ, Channel channel) {
  DenseMatrix out = DenseMatrix::Zero(rho.rows(), rho.cols());
  const bool all = channel == Channel::All;
  if (all || channel == Channel::Coherent) out += -kI * (ops.h_s * rho - rho * ops.h_s);
  if (all || channel == Channel::Upper) {
    out += spec.upper.gamma * occ.f_u * dissipator(ops.c_u_dag, rho) +
           spec.upper.gamma * (1.0 - occ.f_u) * dissipator(ops.c_u, rho);
  }
  if (all || channel == Channel::Lower) {
    out += spec.lower.gamma * occ.f_l * dissipator(ops.c_l_dag, rho) +
           spec.lower.gamma * (1.0 - occ.f_l) * dissipator(ops.c_l, rho);
  }
  if (all || channel == Channel::Bath) {
    out += spec.bath.gamma_b * (occ.n_b + 1.0) * dissipator(ops.a, rho) +
           spec.bath.gamma_b * occ.n_b * dissipator(ops.a_dag, rho);
  }
  return out;
}

double QuantumState::trace_deviation() const { return std::abs(rho.trace() - 1.0); }

double QuantumState::hermiticity_deviation() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double QuantumState::min_eigenvalue() const {
  const DenseMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double QuantumState::fock_tail(const HilbertLayout& layout) const {
  double tail = 0.0;
  for (int i = 0; i < layout.dim(); ++i) {
    if (layout.labels(i).n_photon >= layout.fock_cutoff() - 1) tail += rho(i, i).real();
  }
  return tail;
}

double stationarity_residual(const Liouvillian& liouvillian, const QuantumState& state) {
  const ComplexVector r = liouvillian.matrix * vectorize(state.rho);
  return r.cwiseAbs().maxCoeff();
}

QuantumState steady_state(const Liouvillian& liouvillian) {
  const int d = liouvillian.layout.dim();
  const int dd = d * d;

  // Row 0 is the population equation of rho(0,0); the population rows sum to
  // zero, so it is redundant and can carry the normalization instead.
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(liouvillian.matrix.nonZeros()) + static_cast<std::size_t>(d));
  for (int k = 0; k < liouvillian.matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(liouvillian.matrix, k); it; ++it) {
      if (it.row() != 0) triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int i = 0; i < d; ++i) triplets.emplace_back(0, i + i * d, Complex(1.0, 0.0));
  SparseMatrix system(dd, dd);
  system.setFromTriplets(triplets.begin(), triplets.end());
  system.makeCompressed();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(system);
  lu.factorize(system);
  if (lu.info() != Eigen::Success) {
    throw SolverError("steady_state: factorization failed (" + lu.lastErrorMessage() + ")",
                      std::numeric_limits<double>::infinity());
  }
  ComplexVector rhs = ComplexVector::Zero(dd);
  rhs(0) = 1.0;
  const ComplexVector x = lu.solve(rhs);

  QuantumState state{unvectorize(x, d)};
  state.rho = 0.5 * (state.rho + state.rho.adjoint()).eval();
  state.rho /= state.rho.trace();

  const double residual = stationarity_residual(liouvillian, state);
  if (!(residual < kQuantumResidualTolerance)) {
    std::ostringstream msg;
    msg << "steady_state: residual " << residual << " above " << kQuantumResidualTolerance;
    throw SolverError(msg.str(), residual);
  }
  const double min_eig = state.min_eigenvalue();
  if (min_eig < -1e-10) {
    std::ostringstream msg;
    msg << "steady_state: negative eigenvalue " << min_eig;
    throw SolverError(msg.str(), -min_eig);
  }
  const double tail = state.fock_tail(liouvillian.layout);
  if (tail > kFockTailTolerance) {
    std::ostringstream msg;
    msg << "steady_state: population " << tail << " in the top two Fock states at cutoff "
        << liouvillian.layout.fock_cutoff();
    throw CutoffError(msg.str(), tail);
  }
  return state;
}

QuantumState evolve_quantum(const QuantumState& rho0, const Liouvillian& liouvillian,
                            const QuantumEvolveOptions& options, const QuantumObserver& observer) {
  const double norm = liouvillian.inf_norm();
  const double bound = norm > 0.0 ? 0.05 / norm : std::numeric_limits<double>::infinity();
  const double dt = options.dt > 0.0 ? options.dt : bound;
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "evolve_quantum: step " << dt << " exceeds stability bound " << bound;
    throw ModelError(msg.str());
  }
  if (!(options.t_final >= 0.0)) throw ModelError("evolve_quantum: t_final must be non-negative");

  const Eigen::Index d = rho0.rho.rows();
  if (d != liouvillian.layout.dim()) throw ModelError("evolve_quantum: state dimension mismatch");
  std::size_t steps = 0;
  double h = 0.0;
  if (std::isfinite(dt) && options.t_final > 0.0) {
    steps = static_cast<std::size_t>(std::ceil(options.t_final / dt - 1e-9));
    h = options.t_final / static_cast<double>(steps);
  }

  const SparseMatrix& l = liouvillian.matrix;
  ComplexVector v = vectorize(rho0.rho);
  ComplexVector k1(v.size()), k2(v.size()), k3(v.size()), k4(v.size());

  const double trace0 = std::abs(rho0.rho.trace());
  auto check = [&](double t) {
    QuantumState s{unvectorize(v, d)};
    const double tr = std::abs(s.rho.trace() - rho0.rho.trace());
    const double herm = s.hermiticity_deviation();
    if (tr > 1e-9 * std::max(1.0, trace0) || herm > 1e-9) {
      std::ostringstream msg;
      msg << "evolve_quantum: invariant drift at t=" << t << " (trace " << tr << ", hermiticity " << herm << ")";
      throw SolverError(msg.str(), std::max(tr, herm));
    }
    return s;
  };

  for (std::size_t n = 1; n <= steps; ++n) {
    k1.noalias() = l * v;
    k2.noalias() = l * (v + 0.5 * h * k1);
    k3.noalias() = l * (v + 0.5 * h * k2);
    k4.noalias() = l * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = h * static_cast<double>(n);
    if (n % 256 == 0) check(t);
    if (observer && options.observe_every > 0 && n % options.observe_every == 0) observer(t, check(t));
  }
  return check(options.t_final);
}

QuantumObservables observables(const DenseMatrix& rho, const OperatorSet& ops, const SystemSpec& spec) {
  QuantumObservables o;
  o.sigma_uu = trace_product(ops.n_u, rho).real();
  o.sigma_ll = trace_product(ops.n_l, rho).real();
  o.n_ph = trace_product(ops.n_ph, rho).real();
  o.y = std::conj(spec.cavity.g) * trace_product(ops.c_l_dag * ops.c_u * ops.a_dag, rho);
  const DenseMatrix id = DenseMatrix::Identity(rho.rows(), rho.cols());
  o.f_exact = trace_product(ops.n_u * (id - ops.n_l), rho).real() +
              trace_product((ops.n_u - ops.n_l) * ops.n_ph, rho).real();
  o.f_hf = o.sigma_uu * (1.0 - o.sigma_ll) + (o.sigma_uu - o.sigma_ll) * o.n_ph;
  o.rate = 2.0 * o.y.imag();
  return o;
}

FluxReport fluxes_quantum(const DenseMatrix& rho_ss, const OperatorSet& ops, const SystemSpec& spec,
                          const Occupations& occ) {
  const double residual = apply_generator(rho_ss, ops, spec, occ).cwiseAbs().maxCoeff();
  if (!(residual < kQuantumResidualTolerance)) {
    throw SolverError("fluxes_quantum: state is not stationary", residual);
  }

  const DenseMatrix n_total = ops.n_u + ops.n_l;
  auto flows = [&](Channel ch) {
    const DenseMatrix drho = apply_generator(rho_ss, ops, spec, occ, ch);
    return std::pair{trace_product(ops.h_s, drho).real(), trace_product(n_total, drho).real()};
  };
  const auto [edot_u, ndot_u] = flows(Channel::Upper);
  const auto [edot_l, ndot_l] = flows(Channel::Lower);
  const double edot_b = flows(Channel::Bath).first;

  const QuantumObservables obs = observables(rho_ss, ops, spec);
  const double gu = spec.upper.gamma;
  const double gl = spec.lower.gamma;
  const double gb = spec.bath.gamma_b;
  const double closed_u = spec.levels.e_upper * gu * (occ.f_u - obs.sigma_uu) - gu * obs.y.real();
  const double closed_l = spec.levels.e_lower * gl * (occ.f_l - obs.sigma_ll) - gl * obs.y.real();
  const double closed_b = spec.cavity.omega_cav * gb * (occ.n_b - obs.n_ph) - gb * obs.y.real();
  const double scale = std::max({1.0, std::abs(edot_u), std::abs(edot_l), std::abs(edot_b)});
  const double mismatch =
      std::max({std::abs(edot_u - closed_u), std::abs(edot_l - closed_l), std::abs(edot_b - closed_b)});
  if (mismatch > 1e-9 * scale) {
    throw SolverError("fluxes_quantum: numeric and closed-form energy flows disagree", mismatch);
  }

  FluxReport r;
  r.treatment = Treatment::Quantum;
  r.rate = obs.rate;
  r.ndot_u = ndot_u;
  r.ndot_l = ndot_l;
  r.edot_u = edot_u;
  r.edot_l = edot_l;
  r.edot_b_or_power = edot_b;
  r.predicted = effective_energies_quantum(spec.levels, spec.cavity, gu, gl, gb);
  if (std::abs(r.rate) >= kRateDeadBand) {
    r.measured = EffectiveEnergies{edot_u / r.rate, -edot_l / r.rate, -edot_b / r.rate};
  }
  r.law1_residual = edot_u + edot_l + edot_b;
  return r;
}

SignCheck sign_condition(const QuantumObservables& obs, const Occupations& occ) {
  if (!(occ.f_u < 1.0) || !(occ.f_l < 1.0)) throw ModelError("sign_condition: occupations must be below 1");
  auto sign = [](double x) { return (x > 0.0) - (x < 0.0); };
  SignCheck c;
  c.rhs = occ.f_u / (1.0 - occ.f_u) - occ.f_l / (1.0 - occ.f_l) * occ.n_b / (1.0 + occ.n_b);
  c.rhs_sign = sign(c.rhs);
  c.lhs_sign = std::abs(obs.rate) < kRateDeadBand ? 0 : sign(obs.rate);
  c.agree = c.lhs_sign == c.rhs_sign;
  return c;
}

QuantumSolution solve_quantum_steady_state(const SystemSpec& spec, const Occupations& occ,
                                           const QuantumSolveOptions& options) {
  int cutoff = spec.cavity.fock_cutoff;
  for (;;) {
    HilbertLayout layout(cutoff, options.ordering);
    OperatorSet ops = build_operators(layout, spec);
    const Liouvillian l = build_liouvillian(layout, ops, spec, occ);
    const bool can_extend = options.auto_extend_cutoff && cutoff + options.cutoff_step <= options.max_fock_cutoff;
    try {
      QuantumState state = steady_state(l);
      QuantumSolution sol{layout, std::move(ops), std::move(state), 0.0, 0.0};
      sol.residual = stationarity_residual(l, sol.state);
      sol.fock_tail = sol.state.fock_tail(layout);
      if (sol.fock_tail <= options.refine_tail || !can_extend) return sol;
    } catch (const CutoffError&) {
      if (!can_extend) throw;
    }
    cutoff += options.cutoff_step;
  }
}

}  // namespace tlsthermo
