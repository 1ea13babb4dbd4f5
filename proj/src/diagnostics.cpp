#include "hse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hse {

std::string_view to_string(ObservableKind kind) { return kind == ObservableKind::SigmaZ ? "sigma_z" : "spin1_z"; }

ObservableKind parse_observable_kind(std::string_view name) {
  if (name == "sigma_z") return ObservableKind::SigmaZ;
  if (name == "spin1_z") return ObservableKind::Spin1Z;
  throw DomainError("unknown observable '" + std::string(name) + "'");
}

ObservableMatrix local_observable(ObservableKind kind, int local_dim) {
  if (kind == ObservableKind::SigmaZ) {
    if (local_dim != 2) throw DomainError("sigma_z needs d = 2");
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return {2, m};
  }
  if (local_dim != 3) throw DomainError("spin1_z needs d = 3");
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return {3, m};
}

CMatrix embed_observable(const ObservableMatrix& obs, int site, int n_sites) {
  if (site < 0 || site >= n_sites) throw DomainError("observable site out of range");
  const Index dim = hilbert_dim(n_sites, obs.local_dim);
  const Index d = static_cast<Index>(obs.local_dim);
  const Index stride = static_cast<Index>(checked_pow(d, static_cast<unsigned>(n_sites - 1 - site)));
  CMatrix full = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Index col = 0; col < dim; ++col) {
    const Index level = (col / stride) % d;
    const Index base = col - level * stride;
    for (Index row_level = 0; row_level < d; ++row_level) {
      const Complex value = obs.matrix(static_cast<Eigen::Index>(row_level), static_cast<Eigen::Index>(level));
      if (value != Complex(0.0)) full(static_cast<Eigen::Index>(base + row_level * stride), static_cast<Eigen::Index>(col)) = value;
    }
  }
  return full;
}

namespace {

// Apply the step to every column of `op` (op <- U op).
void step_columns(const CircuitModel& circuit, CMatrix& op, DriveLabel label) {
  const auto dim = static_cast<Index>(op.rows());
  for (Eigen::Index c = 0; c < op.cols(); ++c) circuit.step(std::span<Complex>(op.col(c).data(), dim), label);
}

// op <- U^dagger op, using U^dagger = (U_o U_e)^dagger = U_e^dagger U_o^dagger.
void step_columns_adjoint(const CircuitModel& circuit, CMatrix& op, DriveLabel label) {
  const auto dim = static_cast<Index>(op.rows());
  const CMatrix odd_dag = circuit.odd(label).matrix().adjoint();
  const CMatrix even_dag = circuit.even(label).matrix().adjoint();
  for (Eigen::Index c = 0; c < op.cols(); ++c) {
    std::span<Complex> column(op.col(c).data(), dim);
    apply_layer_in_place(column, circuit.n_sites, circuit.local_dim, odd_dag, LayerParity::Odd);
    apply_layer_in_place(column, circuit.n_sites, circuit.local_dim, even_dag, LayerParity::Even);
  }
}

}  // namespace

void conjugate_by_step(const CircuitModel& circuit, CMatrix& op, DriveLabel label) {
  step_columns(circuit, op, label);
  // (U op) U^dagger = (U (U op)^dagger)^dagger
  CMatrix adj = op.adjoint();
  step_columns(circuit, adj, label);
  op = adj.adjoint();
}

CMatrix heisenberg_operator(const CircuitModel& circuit, const CMatrix& op, std::uint64_t t) {
  // U(t)^dagger O U(t) = U_1^dag ... U_t^dag O U_t ... U_1: conjugate by the
  // latest step first.
  CMatrix result = op;
  for (std::uint64_t s = t; s >= 1; --s) {
    const DriveLabel label = drive_label(s - 1);
    step_columns_adjoint(circuit, result, label);
    CMatrix adj = result.adjoint();
    step_columns_adjoint(circuit, adj, label);
    result = adj.adjoint();
  }
  return result;
}

std::vector<double> autocorrelator_series(const CircuitModel& circuit, const ObservableMatrix& obs, int site,
                                          std::uint64_t horizon, Index cap) {
  if (obs.local_dim != circuit.local_dim) throw DomainError("observable and circuit local dimensions differ");
  const Index dim = hilbert_dim(circuit.n_sites, circuit.local_dim);
  if (dim > cap) throw CapacityError("operator evolution exceeds the dense cap");
  const CMatrix o = embed_observable(obs, site, circuit.n_sites);
  CMatrix evolved = o;
  std::vector<double> series;
  series.reserve(horizon);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    if (t > 0) conjugate_by_step(circuit, evolved, drive_label(t - 1));
    // Tr[O X] = sum_ij O_ji X_ij
    const Complex trace = (o.transpose().cwiseProduct(evolved)).sum() / static_cast<double>(dim);
    if (std::abs(trace.imag()) > 1e-10) throw NumericalError("autocorrelator has a non-negligible imaginary part");
    series.push_back(trace.real());
  }
  return series;
}

std::vector<double> bipartite_entropy_series(const CircuitModel& circuit, const StateVector& initial,
                                             const std::vector<std::uint64_t>& times) {
  if (circuit.n_sites % 2 != 0) throw DomainError("half-chain entropy needs an even number of sites");
  if (!std::is_sorted(times.begin(), times.end())) throw DomainError("entropy times must be increasing");
  StateVector state = initial;
  std::uint64_t now = 0;
  std::vector<double> series;
  series.reserve(times.size());
  for (std::uint64_t t : times) {
    while (now < t) {
      circuit.step(state, drive_label(now));
      ++now;
    }
    series.push_back(von_neumann_entropy(partial_trace_half(state)));
  }
  return series;
}

double page_entropy(int n_sites, int local_dim) {
  if (n_sites % 2 != 0) throw DomainError("Page value is defined here for even N");
  if (local_dim < 2) throw DomainError("need d >= 2");
  return 0.5 * n_sites * std::log(static_cast<double>(local_dim)) - 0.5;
}

}  // namespace hse
