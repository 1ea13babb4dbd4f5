#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hse/haar.hpp"
#include "hse/qudit.hpp"

using namespace hse;

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

CMatrix swap_gate() {
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = s(3, 3) = 1.0;
  s(1, 2) = s(2, 1) = 1.0;
  return s;
}

StateVector random_state(int n, int d, Rng& rng) { return StateVector(n, d, sample_haar_state(hilbert_dim(n, d), rng)); }

}  // namespace

TEST(BasisState, EncodingIsBigEndian) {
  const std::vector<int> zeros{0, 0};
  const StateVector s = new_basis_state(2, 2, zeros);
  EXPECT_EQ(s[0], Complex(1.0));
  EXPECT_DOUBLE_EQ(s.norm(), 1.0);

  const std::vector<int> ones{1, 1, 1, 1};
  const StateVector t = new_basis_state(4, 3, ones);
  EXPECT_EQ(t.dim(), 81u);
  EXPECT_EQ(t[40], Complex(1.0));
  EXPECT_EQ(digits_to_index(std::vector<int>{1, 2, 0}, 3), 15u);
  EXPECT_EQ(index_to_digits(15, 3, 3), (std::vector<int>{1, 2, 0}));
}

TEST(BasisState, PlusState) {
  const StateVector s = new_plus_state(2, 2);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(s[i].real(), 0.5, 1e-15);
}

TEST(BasisState, RejectsBadInput) {
  EXPECT_THROW(new_basis_state(2, 2, std::vector<int>{0, 2}), DomainError);
  EXPECT_THROW(new_basis_state(2, 2, std::vector<int>{0}), DomainError);
  EXPECT_THROW(StateVector(2, 2, CVector::Zero(3)), DomainError);
  EXPECT_THROW(StateVector(2, 2, CVector::Zero(4)), DomainError);
}

TEST(Gates, SwapMovesExcitation) {
  const StateVector s = new_basis_state(2, 2, std::vector<int>{0, 1});
  const StateVector out = apply_two_site_gate(s, LocalGate(2, swap_gate()), 0);
  EXPECT_EQ(out[2], Complex(1.0));
  EXPECT_EQ(out[1], Complex(0.0));
}

TEST(Gates, IdentityIsBitExact) {
  Rng rng(3);
  const StateVector s = random_state(3, 3, rng);
  const StateVector out = apply_two_site_gate(s, LocalGate::identity(3), 1);
  for (Index i = 0; i < s.dim(); ++i) EXPECT_EQ(out[i], s[i]);
}

TEST(Gates, MatchesKroneckerOracle) {
  Rng rng(11);
  for (int left = 0; left < 2; ++left) {
    const CMatrix u = sample_haar_unitary(4, rng);
    const StateVector s = random_state(3, 2, rng);
    const CMatrix id2 = CMatrix::Identity(2, 2);
    const CMatrix full = left == 0 ? kron(u, id2) : kron(id2, u);
    const CVector expected = full * s.amplitudes();
    const StateVector out = apply_two_site_gate(s, LocalGate(2, u), left);
    EXPECT_LT((out.amplitudes() - expected).cwiseAbs().maxCoeff(), 1e-12) << "left=" << left;
  }
}

TEST(Gates, QutritKroneckerOracle) {
  Rng rng(12);
  const CMatrix u = sample_haar_unitary(9, rng);
  const StateVector s = random_state(3, 3, rng);
  const CVector expected = kron(CMatrix::Identity(3, 3), u) * s.amplitudes();
  const StateVector out = apply_two_site_gate(s, LocalGate(3, u), 1);
  EXPECT_LT((out.amplitudes() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Layers, OpenBoundaryPlacement) {
  Rng rng(5);
  const CMatrix u = sample_haar_unitary(4, rng);
  const CMatrix id2 = CMatrix::Identity(2, 2);
  const LocalGate gate(2, u);

  const StateVector s4 = random_state(4, 2, rng);
  EXPECT_LT((apply_layer(s4, gate, LayerParity::Even).amplitudes() - kron(u, u) * s4.amplitudes()).norm(), 1e-12);
  const CMatrix odd4 = kron(kron(id2, u), id2);
  EXPECT_LT((apply_layer(s4, gate, LayerParity::Odd).amplitudes() - odd4 * s4.amplitudes()).norm(), 1e-12);

  const StateVector s5 = random_state(5, 2, rng);
  const CMatrix even5 = kron(kron(u, u), id2);
  EXPECT_LT((apply_layer(s5, gate, LayerParity::Even).amplitudes() - even5 * s5.amplitudes()).norm(), 1e-12);
  const CMatrix odd5 = kron(kron(id2, u), u);
  EXPECT_LT((apply_layer(s5, gate, LayerParity::Odd).amplitudes() - odd5 * s5.amplitudes()).norm(), 1e-12);
}

TEST(LocalGateTest, RejectsNonUnitary) {
  CMatrix m = CMatrix::Identity(4, 4);
  m(0, 0) = 2.0;
  EXPECT_THROW(LocalGate(2, m), DomainError);
  EXPECT_THROW(LocalGate(2, CMatrix::Identity(3, 3)), DomainError);
}

TEST(InnerProduct, Examples) {
  Rng rng(8);
  const StateVector s = random_state(3, 2, rng);
  EXPECT_NEAR(std::abs(inner_product(s, s) - Complex(1.0)), 0.0, 1e-12);
  const StateVector a = new_basis_state(2, 2, std::vector<int>{0, 0});
  const StateVector b = new_basis_state(2, 2, std::vector<int>{1, 1});
  EXPECT_EQ(inner_product(a, b), Complex(0.0));
  EXPECT_NEAR(inner_product(new_plus_state(2, 2), a).real(), 0.5, 1e-15);
}

TEST(PartialTrace, ProductBellAndGhz) {
  const DensityMatrix product = partial_trace_half(new_basis_state(4, 2, Index{0}));
  EXPECT_NEAR(product.matrix()(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(product.matrix().cwiseAbs().sum(), 1.0, 1e-15);

  CVector bell = CVector::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  const DensityMatrix half = partial_trace_half(StateVector(2, 2, bell));
  EXPECT_NEAR(half.matrix()(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(half.matrix()(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(half.matrix()(0, 1)), 0.0, 1e-15);

  CVector ghz = CVector::Zero(16);
  ghz[0] = ghz[15] = 1.0 / std::sqrt(2.0);
  const CMatrix rho = partial_trace_half(StateVector(4, 2, ghz)).matrix();
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho(3, 3).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(PartialTrace, KeepsLastHalf) {
  // |01> on two qubits: the reduced state of site 1 is |1><1|.
  const CMatrix rho = partial_trace_half(new_basis_state(2, 2, std::vector<int>{0, 1})).matrix();
  EXPECT_NEAR(rho(1, 1).real(), 1.0, 1e-15);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(von_neumann_entropy(partial_trace_half(new_basis_state(4, 3, Index{7}))), 0.0, 1e-10);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(CMatrix::Identity(4, 4) / 4.0)), std::log(4.0), 1e-12);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(CMatrix::Identity(2, 2) / 2.0)), std::numbers::ln2, 1e-12);
}

TEST(DensityMatrixTest, Validation) {
  EXPECT_THROW(DensityMatrix(CMatrix::Identity(2, 2)), DomainError);
  CMatrix m = CMatrix::Identity(2, 2) / 2.0;
  m(0, 1) = Complex(0.0, 0.1);
  EXPECT_THROW(DensityMatrix{m}, DomainError);
}

TEST(Haar, StateFirstMoment) {
  Rng rng(100);
  const int samples = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const CVector v = sample_haar_state(16, rng);
    ASSERT_NEAR(v.norm(), 1.0, 1e-12);
    const double p = std::norm(v[0]);
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
  EXPECT_LT(std::abs(mean - 1.0 / 16), 3 * se);
}

TEST(Haar, SubspaceSupportAndFirstMoment) {
  Rng rng(101);
  const CVector single = sample_haar_state_in_subspace(std::vector<Index>{5}, 9, rng);
  EXPECT_NEAR(std::abs(single[5]), 1.0, 1e-15);

  std::vector<Index> set;
  for (Index i = 0; i < 15; ++i) set.push_back(3 + 5 * i);
  std::vector<bool> inside(81, false);
  for (Index i : set) inside[i] = true;
  CMatrix mean = CMatrix::Zero(81, 81);
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    const CVector v = sample_haar_state_in_subspace(set, 81, rng);
    for (Index i = 0; i < 81; ++i) {
      if (!inside[i]) {
        ASSERT_EQ(v[static_cast<Eigen::Index>(i)], Complex(0.0));
      }
    }
    mean.noalias() += v * v.adjoint();
  }
  mean /= samples;
  CMatrix expected = CMatrix::Zero(81, 81);
  for (Index i : set) expected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0 / 15;
  EXPECT_LT((mean - expected).squaredNorm(), 1e-3);
}

TEST(Haar, SubspaceRejectsBadSets) {
  Rng rng(1);
  EXPECT_THROW(sample_haar_state_in_subspace(std::vector<Index>{}, 4, rng), DomainError);
  EXPECT_THROW(sample_haar_state_in_subspace(std::vector<Index>{1, 1}, 4, rng), DomainError);
  EXPECT_THROW(sample_haar_state_in_subspace(std::vector<Index>{4}, 4, rng), DomainError);
}

TEST(Haar, UnitaryProperties) {
  Rng rng(102);
  const int samples = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const CMatrix u = sample_haar_unitary(3, rng);
    if (i < 1000) {
      ASSERT_LT(unitarity_defect(u), 1e-12);
    }
    const double p = std::norm(u(0, 0));
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
  EXPECT_LT(std::abs(mean - 1.0 / 3), 3 * se);

  const CMatrix phase = sample_haar_unitary(1, rng);
  EXPECT_NEAR(std::abs(phase(0, 0)), 1.0, 1e-15);
}

TEST(RngTest, SplitIsDeterministicAndDistinct) {
  const Rng master(42);
  Rng a = master.split(3), b = master.split(3), c = master.split(4);
  const auto x = a(), y = b(), z = c();
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
  EXPECT_NE(child_seed(1, 0), child_seed(1, 1));
  EXPECT_NE(child_seed(1, 0), child_seed(2, 0));
}
