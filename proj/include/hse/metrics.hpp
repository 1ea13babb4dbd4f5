#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hse/types.hpp"

namespace hse {

// binomial(D+k-1, k): dimension of the symmetric subspace Sym^k(C^D).
std::uint64_t sym_dim(Index dim, int order);

// A k-th moment operator on (C^D)^{(x)k}, stored densely (D^k x D^k).
struct MomentMatrix {
  Index base_dim = 0;
  int order = 0;
  CMatrix matrix;
};

inline constexpr Index kDenseMomentCap = 4096;

// sum over permutations of tensor factors / (D (D+1) ... (D+k-1)).
MomentMatrix haar_moment_dense(Index dim, int order, Index cap = kDenseMomentCap);

// (1/T) sum_t (|psi_t><psi_t|)^{(x)k}.
MomentMatrix temporal_moment_dense(std::span<const CVector> states, int order, Index cap = kDenseMomentCap);

// Tr[(A-B)^dagger (A-B)].
double hs_distance_sq(const MomentMatrix& a, const MomentMatrix& b);

// Accumulates S_k = sum_{t,t'} |<psi_t|psi_t'>|^{2k} for k = 1..k_max.
//
// Two routes give S_k exactly:
//  * Gram: keep every state and add overlap powers against all previous ones
//    (blocked GEMM, O(T^2 D) total, O(T D) memory).
//  * Symmetric moment: keep M_k = sum_t v_t v_t^dagger with v_t = psi_t^{(x)k}
//    in orthonormal Sym^k coordinates; S_k = ||M_k||_F^2. O(sym_dim^2) memory
//    and O(sym_dim^2) work per state, independent of T.
// Each k takes the moment route when sym_dim(D, k) <= moment_dim_limit.
struct EnsembleOptions {
  Index moment_dim_limit = 512;
  bool retain_states = false;
};

class TemporalEnsemble {
 public:
  TemporalEnsemble(Index dim, int k_max, EnsembleOptions options = {});
  ~TemporalEnsemble();
  TemporalEnsemble(TemporalEnsemble&&) noexcept;
  TemporalEnsemble& operator=(TemporalEnsemble&&) noexcept;

  Index dim() const { return dim_; }
  int k_max() const { return k_max_; }
  std::uint64_t count() const { return count_; }

  void accumulate(std::span<const Complex> state);
  void accumulate(const CVector& state);
  // Columns of `states` are appended in order.
  void accumulate_block(const CMatrix& states);

  // S_k; throws DomainError for k outside 1..k_max.
  double power_sum(int order) const;

  bool uses_moment_route(int order) const;
  bool retains_states() const { return retain_; }
  // D x T view of the retained states; empty when nothing is retained.
  Eigen::Map<const CMatrix> states() const;

  // Largest probability weight outside `sector` over all retained states.
  double max_leakage(std::span<const Index> sector) const;

 private:
  class SymmetricMoment;

  Index dim_;
  int k_max_;
  std::uint64_t count_ = 0;
  bool retain_ = false;
  std::vector<double> gram_sums_;
  std::vector<std::unique_ptr<SymmetricMoment>> moments_;  // null where the Gram route is used
  std::vector<Complex> stored_;
};

// Delta_T^(k) = S_k / T^2 - 1/binomial(D_eff+k-1, k): squared HS distance of
// the temporal k-th moment to the Haar k-th moment on a D_eff-dimensional
// space that contains every accumulated state.
double delta_gram(const TemporalEnsemble& ensemble, int order, Index effective_dim);

// B(D) = 1/(D+1) - 1/sqrt(2D(D+1)).
double bound_B(Index dim);
// 4 B(D)^2 / D.
double hs_lower_bound(Index dim);

// HS^2 distance between Haar k-th moments on C^D and on a D'-dim subspace:
// 1/binomial(D'+k-1,k) - 1/binomial(D+k-1,k).
double cross_haar_distance(Index dim, Index sub_dim, int order);

}  // namespace hse
