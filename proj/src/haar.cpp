#include "hse/haar.hpp"

#include <algorithm>
#include <vector>

#include <Eigen/QR>

namespace hse {

namespace {

Complex complex_normal(Rng& rng) {
  const double re = rng.normal();
  const double im = rng.normal();
  return {re, im};
}

}  // namespace

CVector sample_haar_state(Index dim, Rng& rng) {
  if (dim < 1) throw DomainError("Haar state needs dim >= 1");
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = complex_normal(rng);
  v /= v.norm();
  return v;
}

CVector sample_haar_state_in_subspace(std::span<const Index> basis_indices, Index dim, Rng& rng) {
  if (basis_indices.empty()) throw DomainError("subspace index set is empty");
  std::vector<Index> sorted(basis_indices.begin(), basis_indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("subspace index set has duplicates");
  }
  if (sorted.back() >= dim) throw DomainError("subspace index out of range");

  const CVector local = sample_haar_state(basis_indices.size(), rng);
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  for (Index i = 0; i < basis_indices.size(); ++i) {
    v[static_cast<Eigen::Index>(basis_indices[i])] = local[static_cast<Eigen::Index>(i)];
  }
  return v;
}

CMatrix sample_haar_unitary(Index m, Rng& rng) {
  if (m < 1) throw DomainError("Haar unitary needs m >= 1");
  const auto n = static_cast<Eigen::Index>(m);
  CMatrix z(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) z(r, c) = complex_normal(rng);
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex diag = r(j, j);
    const double mag = std::abs(diag);
    q.col(j) *= mag > 0.0 ? diag / mag : Complex(1.0);
  }
  return q;
}

}  // namespace hse
