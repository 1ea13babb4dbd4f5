#include "hse/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace hse {

namespace {

void require_local_dim(int local_dim) {
  if (local_dim < 2) throw DomainError("local dimension must be >= 2");
}

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

Index hilbert_dim(int n_sites, int local_dim) {
  require_local_dim(local_dim);
  if (n_sites < 1) throw DomainError("need at least one site");
  return static_cast<Index>(checked_pow(static_cast<std::uint64_t>(local_dim),
                                        static_cast<unsigned>(n_sites)));
}

StateVector::StateVector(int n_sites, int local_dim, CVector amplitudes)
    : n_sites_(n_sites), local_dim_(local_dim), amplitudes_(std::move(amplitudes)) {
  if (static_cast<Index>(amplitudes_.size()) != hilbert_dim(n_sites, local_dim)) {
    throw DomainError("amplitude vector length must equal d^N");
  }
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-10) throw DomainError("state vector must have unit norm");
}

double unitarity_defect(const CMatrix& u) {
  const CMatrix prod = u.adjoint() * u;
  return (prod - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

LocalGate::LocalGate(int local_dim, CMatrix matrix) : local_dim_(local_dim), matrix_(std::move(matrix)) {
  require_local_dim(local_dim);
  const Eigen::Index n = static_cast<Eigen::Index>(local_dim) * local_dim;
  if (matrix_.rows() != n || matrix_.cols() != n) throw DomainError("gate must be d^2 x d^2");
  if (unitarity_defect(matrix_) > 1e-12) throw DomainError("gate is not unitary");
}

LocalGate LocalGate::identity(int local_dim) {
  const Eigen::Index n = static_cast<Eigen::Index>(local_dim) * local_dim;
  return LocalGate(local_dim, CMatrix::Identity(n, n));
}

DensityMatrix::DensityMatrix(CMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw DomainError("density matrix must be square and non-empty");
  }
  if (hermiticity_defect(matrix_) > 1e-12) throw DomainError("density matrix is not Hermitian");
  if (std::abs(matrix_.trace() - Complex(1.0)) > 1e-12) throw DomainError("density matrix trace != 1");
}

std::vector<int> index_to_digits(Index index, int n_sites, int local_dim) {
  std::vector<int> digits(static_cast<std::size_t>(n_sites));
  for (int s = n_sites - 1; s >= 0; --s) {
    digits[static_cast<std::size_t>(s)] = static_cast<int>(index % static_cast<Index>(local_dim));
    index /= static_cast<Index>(local_dim);
  }
  return digits;
}

Index digits_to_index(std::span<const int> digits, int local_dim) {
  Index index = 0;
  for (int digit : digits) {
    if (digit < 0 || digit >= local_dim) {
      throw DomainError("digit " + std::to_string(digit) + " out of range [0, d)");
    }
    index = index * static_cast<Index>(local_dim) + static_cast<Index>(digit);
  }
  return index;
}

StateVector new_basis_state(int n_sites, int local_dim, std::span<const int> digits) {
  require_local_dim(local_dim);
  if (static_cast<int>(digits.size()) != n_sites) throw DomainError("need one digit per site");
  const Index dim = hilbert_dim(n_sites, local_dim);
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(dim));
  amps[static_cast<Eigen::Index>(digits_to_index(digits, local_dim))] = 1.0;
  return StateVector(n_sites, local_dim, std::move(amps));
}

StateVector new_basis_state(int n_sites, int local_dim, Index index) {
  const Index dim = hilbert_dim(n_sites, local_dim);
  if (index >= dim) throw DomainError("basis index out of range");
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(dim));
  amps[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(n_sites, local_dim, std::move(amps));
}

StateVector new_plus_state(int n_sites, int local_dim) {
  const Index dim = hilbert_dim(n_sites, local_dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  return StateVector(n_sites, local_dim, CVector::Constant(static_cast<Eigen::Index>(dim), amp));
}

void apply_two_site_gate_in_place(std::span<Complex> amplitudes, int n_sites, int local_dim,
                                  const CMatrix& gate, int left_site) {
  if (left_site < 0 || left_site + 1 >= n_sites) throw DomainError("gate site out of range");
  const Index d = static_cast<Index>(local_dim);
  const Index pair = d * d;
  if (static_cast<Index>(gate.rows()) != pair || static_cast<Index>(gate.cols()) != pair) {
    throw DomainError("gate dimension does not match local dimension");
  }
  const Index dim = amplitudes.size();
  const Index right_stride = static_cast<Index>(checked_pow(d, static_cast<unsigned>(n_sites - 2 - left_site)));
  const Index left_stride = right_stride * d;
  const Index block = left_stride * d;

  // Scratch sized for the largest local dimension we expect; falls back to heap.
  constexpr Index kInline = 64;
  Complex inline_in[kInline];
  Complex inline_out[kInline];
  std::vector<Complex> heap_in, heap_out;
  Complex* in = inline_in;
  Complex* out = inline_out;
  if (pair > kInline) {
    heap_in.resize(pair);
    heap_out.resize(pair);
    in = heap_in.data();
    out = heap_out.data();
  }

  for (Index outer = 0; outer < dim; outer += block) {
    for (Index inner = 0; inner < right_stride; ++inner) {
      const Index base = outer + inner;
      for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) in[a * d + b] = amplitudes[base + a * left_stride + b * right_stride];
      }
      for (Index r = 0; r < pair; ++r) {
        Complex acc = 0.0;
        for (Index c = 0; c < pair; ++c) {
          acc += gate(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
        }
        out[r] = acc;
      }
      for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) amplitudes[base + a * left_stride + b * right_stride] = out[a * d + b];
      }
    }
  }
}

void apply_two_site_gate_in_place(StateVector& state, const LocalGate& gate, int left_site) {
  if (gate.local_dim() != state.local_dim()) throw DomainError("gate/state local dimension mismatch");
  auto& amps = state.amplitudes();
  apply_two_site_gate_in_place(std::span<Complex>(amps.data(), static_cast<Index>(amps.size())),
                               state.n_sites(), state.local_dim(), gate.matrix(), left_site);
}

StateVector apply_two_site_gate(StateVector state, const LocalGate& gate, int left_site) {
  apply_two_site_gate_in_place(state, gate, left_site);
  return state;
}

void apply_layer_in_place(std::span<Complex> amplitudes, int n_sites, int local_dim, const CMatrix& gate,
                          LayerParity parity) {
  const int first = parity == LayerParity::Even ? 0 : 1;
  for (int left = first; left + 1 < n_sites; left += 2) {
    apply_two_site_gate_in_place(amplitudes, n_sites, local_dim, gate, left);
  }
}

void apply_layer_in_place(StateVector& state, const LocalGate& gate, LayerParity parity) {
  if (gate.local_dim() != state.local_dim()) throw DomainError("gate/state local dimension mismatch");
  auto& amps = state.amplitudes();
  apply_layer_in_place(std::span<Complex>(amps.data(), static_cast<Index>(amps.size())), state.n_sites(),
                       state.local_dim(), gate.matrix(), parity);
}

StateVector apply_layer(StateVector state, const LocalGate& gate, LayerParity parity) {
  apply_layer_in_place(state, gate, parity);
  return state;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DomainError("inner product of states with different dimensions");
  return a.amplitudes().dot(b.amplitudes());
}

DensityMatrix partial_trace_half(const StateVector& state) {
  const int n = state.n_sites();
  if (n % 2 != 0) throw DomainError("half-chain partial trace needs an even number of sites");
  const auto half = static_cast<Eigen::Index>(hilbert_dim(n / 2, state.local_dim()));
  // Column-major view: entry (b, a) is the amplitude of |a>_A |b>_B.
  Eigen::Map<const CMatrix> psi(state.amplitudes().data(), half, half);
  CMatrix rho = psi * psi.adjoint();
  // Symmetrize away rounding so the Hermiticity check is exact.
  rho = (0.5 * (rho + rho.adjoint())).eval();
  // Long evolutions drift the norm by ~1e-13; absorb it, but refuse real errors.
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-10) throw DomainError("partial trace needs a normalized state");
  rho /= trace;
  return DensityMatrix(std::move(rho));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  if (evals.minCoeff() < -1e-10) throw NumericalError("density matrix has a negative eigenvalue");
  double entropy = 0.0;
  for (double lambda : evals) {
    if (lambda > kEntropyEigenvalueFloor) entropy -= lambda * std::log(lambda);
  }
  return std::max(entropy, 0.0);
}

}  // namespace hse
