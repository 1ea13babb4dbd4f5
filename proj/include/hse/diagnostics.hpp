#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hse/models.hpp"

namespace hse {

enum class ObservableKind { SigmaZ, Spin1Z };

std::string_view to_string(ObservableKind kind);
ObservableKind parse_observable_kind(std::string_view name);

// Single-site Hermitian observable.
struct ObservableMatrix {
  int local_dim = 0;
  CMatrix matrix;
};

// sigma_z = diag(+1, -1) on a qubit. spin1_z = diag(+1, 0, -1) on a qutrit,
// with computational levels 0, 1, 2 carrying spin labels +1, 0, -1.
ObservableMatrix local_observable(ObservableKind kind, int local_dim);

// The observable acting on `site` of an N-site chain, as a dense D x D matrix.
CMatrix embed_observable(const ObservableMatrix& obs, int site, int n_sites);

inline constexpr Index kOperatorDenseCap = 256;

// A(t) = Tr[O(t) O] / D for t = 0 .. horizon-1, O(t) = U(t)^dagger O U(t).
// Computed as Tr[O U(t) O U(t)^dagger]/D, which is the same trace, so the
// evolved operator can be updated one drive step at a time by two-sided gate
// contraction. Throws NumericalError if |Im| exceeds 1e-10.
std::vector<double> autocorrelator_series(const CircuitModel& circuit, const ObservableMatrix& obs, int site,
                                          std::uint64_t horizon, Index cap = kOperatorDenseCap);

// Heisenberg-picture operator U(t)^dagger O U(t) built from scratch.
CMatrix heisenberg_operator(const CircuitModel& circuit, const CMatrix& op, std::uint64_t t);

// X <- U(label) X U(label)^dagger for a dense D x D operator.
void conjugate_by_step(const CircuitModel& circuit, CMatrix& op, DriveLabel label);

// Half-chain von Neumann entropy of |psi(t)> for every t in `times`
// (increasing, starting at 0 or later).
std::vector<double> bipartite_entropy_series(const CircuitModel& circuit, const StateVector& initial,
                                             const std::vector<std::uint64_t>& times);

// (N/2) ln d - 1/2.
double page_entropy(int n_sites, int local_dim);

}  // namespace hse
