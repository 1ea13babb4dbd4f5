#pragma once

#include <span>
#include <vector>

#include "hse/types.hpp"

namespace hse {

// Basis encoding used everywhere: big-endian base-d, site 0 is the most
// significant digit. For N=4, d=3 the digits (1,1,1,1) map to index 40.

// Pure state of N qudits with local dimension d, amplitudes over d^N entries.
class StateVector {
 public:
  StateVector(int n_sites, int local_dim, CVector amplitudes);

  int n_sites() const { return n_sites_; }
  int local_dim() const { return local_dim_; }
  Index dim() const { return static_cast<Index>(amplitudes_.size()); }

  const CVector& amplitudes() const { return amplitudes_; }
  CVector& amplitudes() { return amplitudes_; }
  Complex operator[](Index i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

  double norm() const { return amplitudes_.norm(); }

 private:
  int n_sites_;
  int local_dim_;
  CVector amplitudes_;
};

// Two-site gate acting on a pair of neighbouring qudits. The d^2 x d^2 matrix
// uses the same big-endian convention: row index a*d + b for |a b>.
class LocalGate {
 public:
  // Throws DomainError unless the matrix is d^2 x d^2 and unitary to 1e-12.
  LocalGate(int local_dim, CMatrix matrix);

  static LocalGate identity(int local_dim);

  int local_dim() const { return local_dim_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  int local_dim_;
  CMatrix matrix_;
};

// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix matrix);

  Index dim() const { return static_cast<Index>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }

 private:
  CMatrix matrix_;
};

enum class LayerParity { Even, Odd };

Index hilbert_dim(int n_sites, int local_dim);

// Base-d digits of a basis index, site 0 first.
std::vector<int> index_to_digits(Index index, int n_sites, int local_dim);
Index digits_to_index(std::span<const int> digits, int local_dim);

StateVector new_basis_state(int n_sites, int local_dim, std::span<const int> digits);
StateVector new_basis_state(int n_sites, int local_dim, Index index);
// Uniform superposition (|0> + ... + |d-1>)/sqrt(d) on every site.
StateVector new_plus_state(int n_sites, int local_dim);

// In-place kernel on a raw amplitude buffer of length d^N. Contracts the gate
// over the two-site sub-index; never forms the d^N x d^N operator.
void apply_two_site_gate_in_place(std::span<Complex> amplitudes, int n_sites, int local_dim,
                                  const CMatrix& gate, int left_site);
void apply_two_site_gate_in_place(StateVector& state, const LocalGate& gate, int left_site);
StateVector apply_two_site_gate(StateVector state, const LocalGate& gate, int left_site);

// Even parity covers bonds (0,1),(2,3),...; odd covers (1,2),(3,4),... with
// open boundaries.
void apply_layer_in_place(std::span<Complex> amplitudes, int n_sites, int local_dim,
                          const CMatrix& gate, LayerParity parity);
void apply_layer_in_place(StateVector& state, const LocalGate& gate, LayerParity parity);
StateVector apply_layer(StateVector state, const LocalGate& gate, LayerParity parity);

// <a|b>, conjugate-linear in a.
Complex inner_product(const StateVector& a, const StateVector& b);

// Reduced state of the last N/2 sites after tracing out the first N/2.
DensityMatrix partial_trace_half(const StateVector& state);

// Eigenvalues below this contribute nothing to the entropy.
inline constexpr double kEntropyEigenvalueFloor = 1e-12;

// -sum lambda ln lambda, natural-log units.
double von_neumann_entropy(const DensityMatrix& rho);

// Max-entry magnitude of U^dagger U - I.
double unitarity_defect(const CMatrix& u);

}  // namespace hse
