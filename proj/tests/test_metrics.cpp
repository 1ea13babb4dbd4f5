#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hse/haar.hpp"
#include "hse/metrics.hpp"
#include "hse/selftest.hpp"

using namespace hse;

namespace {

CMatrix swap2() {
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = s(3, 3) = 1.0;
  s(1, 2) = s(2, 1) = 1.0;
  return s;
}

// Brute-force S_k over all ordered pairs.
double brute_power_sum(const std::vector<CVector>& states, int k) {
  double s = 0.0;
  for (const auto& a : states) {
    for (const auto& b : states) s += std::pow(std::norm(a.dot(b)), k);
  }
  return s;
}

}  // namespace

TEST(SymDim, Values) {
  EXPECT_EQ(sym_dim(16, 2), 136u);
  EXPECT_EQ(sym_dim(15, 2), 120u);
  EXPECT_EQ(sym_dim(7, 1), 7u);
  EXPECT_EQ(sym_dim(81, 3), 91881u);
}

TEST(HaarMoment, ClosedForms) {
  const MomentMatrix m1 = haar_moment_dense(5, 1);
  EXPECT_LT((m1.matrix - CMatrix::Identity(5, 5) / 5.0).cwiseAbs().maxCoeff(), 1e-15);
  const MomentMatrix m2 = haar_moment_dense(2, 2);
  EXPECT_LT((m2.matrix - (CMatrix::Identity(4, 4) + swap2()) / 6.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(m2.matrix.trace().real(), 1.0, 1e-15);
  const MomentMatrix m3 = haar_moment_dense(3, 3);
  EXPECT_NEAR(m3.matrix.trace().real(), 1.0, 1e-13);
  // (symmetric projector)/sym_dim: M^2 = M / sym_dim.
  EXPECT_LT((m3.matrix * m3.matrix - m3.matrix / 10.0).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(haar_moment_dense(20, 3), CapacityError);
}

TEST(HaarMoment, MonteCarloAgreement) {
  Rng rng(21);
  for (Index dim : {2, 3, 4}) {
    std::vector<CVector> samples;
    for (int i = 0; i < 100000; ++i) samples.push_back(sample_haar_state(dim, rng));
    const double distance = hs_distance_sq(temporal_moment_dense(samples, 2), haar_moment_dense(dim, 2));
    EXPECT_LT(distance, 1e-3) << "D=" << dim;
  }
}

TEST(TemporalMoment, Examples) {
  CVector e0 = CVector::Zero(2), e1 = CVector::Zero(2);
  e0[0] = 1.0;
  e1[1] = 1.0;
  const MomentMatrix single = temporal_moment_dense(std::vector<CVector>{e0}, 1);
  EXPECT_EQ(single.matrix(0, 0), Complex(1.0));
  const MomentMatrix mix = temporal_moment_dense(std::vector<CVector>{e0, e1}, 1);
  EXPECT_LT((mix.matrix - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);

  Rng rng(22);
  std::vector<CVector> states;
  for (int i = 0; i < 7; ++i) states.push_back(sample_haar_state(3, rng));
  const CMatrix m = temporal_moment_dense(states, 2).matrix;
  EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(m.trace().real(), 1.0, 1e-10);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  EXPECT_GT(solver.eigenvalues().minCoeff(), -1e-10);
}

TEST(HsDistance, Examples) {
  const MomentMatrix a{2, 1, CMatrix::Identity(2, 2)};
  EXPECT_EQ(hs_distance_sq(a, a), 0.0);
  MomentMatrix p{2, 1, CMatrix::Zero(2, 2)}, q{2, 1, CMatrix::Zero(2, 2)};
  p.matrix(0, 0) = 1.0;
  q.matrix(1, 1) = 1.0;
  EXPECT_NEAR(hs_distance_sq(p, q), 2.0, 1e-15);
  CVector e0 = CVector::Zero(16);
  e0[0] = 1.0;
  EXPECT_NEAR(hs_distance_sq(temporal_moment_dense(std::vector<CVector>{e0}, 1), haar_moment_dense(16, 1)), 0.9375,
              1e-15);
}

TEST(DeltaGram, SingleState) {
  Rng rng(23);
  TemporalEnsemble e(16, 2);
  e.accumulate(sample_haar_state(16, rng));
  EXPECT_NEAR(delta_gram(e, 1, 16), 0.9375, 1e-15);
  EXPECT_NEAR(delta_gram(e, 2, 16), 1.0 - 1.0 / 136, 1e-15);
}

TEST(DeltaGram, MatchesDenseOracle) {
  Rng rng(24);
  std::vector<CVector> states;
  for (int i = 0; i < 200; ++i) states.push_back(sample_haar_state(4, rng));
  const double dense = hs_distance_sq(temporal_moment_dense(states, 2), haar_moment_dense(4, 2));
  for (Index limit : {Index{0}, Index{512}}) {
    TemporalEnsemble e(4, 2, EnsembleOptions{limit, false});
    for (const auto& s : states) e.accumulate(s);
    EXPECT_NEAR(delta_gram(e, 2, 4), dense, 1e-10);
  }
}

TEST(DeltaGram, OracleSuite) {
  const OracleCheck check = oracle_equivalence_check(20, 5);
  EXPECT_EQ(check.cases, 300);
  EXPECT_LT(check.max_error, 1e-10);
}

TEST(TemporalEnsembleTest, RoutesAgreeWithBruteForce) {
  Rng rng(25);
  std::vector<CVector> states;
  for (int i = 0; i < 150; ++i) states.push_back(sample_haar_state(5, rng));
  TemporalEnsemble gram(5, 3, EnsembleOptions{0, false});
  TemporalEnsemble moment(5, 3, EnsembleOptions{4096, false});
  TemporalEnsemble blocked(5, 3, EnsembleOptions{0, true});
  CMatrix block(5, 150);
  for (int i = 0; i < 150; ++i) {
    gram.accumulate(states[i]);
    moment.accumulate(states[i]);
    block.col(i) = states[i];
  }
  blocked.accumulate_block(block.leftCols(70));
  blocked.accumulate_block(block.rightCols(80));
  EXPECT_FALSE(gram.uses_moment_route(2));
  EXPECT_TRUE(moment.uses_moment_route(2));
  for (int k = 1; k <= 3; ++k) {
    const double brute = brute_power_sum(states, k);
    EXPECT_NEAR(gram.power_sum(k), brute, 1e-9 * brute);
    EXPECT_NEAR(moment.power_sum(k), brute, 1e-9 * brute);
    EXPECT_NEAR(blocked.power_sum(k), brute, 1e-9 * brute);
  }
  EXPECT_EQ(blocked.states().cols(), 150);
  EXPECT_THROW(gram.power_sum(4), DomainError);
}

TEST(TemporalEnsembleTest, AccumulationRules) {
  TemporalEnsemble e(4, 2);
  CVector a = CVector::Zero(4), b = CVector::Zero(4);
  a[0] = 1.0;
  b[1] = 1.0;
  e.accumulate(a);
  EXPECT_DOUBLE_EQ(e.power_sum(1), 1.0);
  EXPECT_DOUBLE_EQ(e.power_sum(2), 1.0);
  e.accumulate(b);
  EXPECT_NEAR(e.power_sum(1), 2.0, 1e-15);
  e.accumulate(a);
  // duplicate of the first state: +1 + 2 * (overlap with a) + 2 * (overlap with b)
  EXPECT_NEAR(e.power_sum(2), 2.0 + 1.0 + 2.0, 1e-14);
  TemporalEnsemble d(4, 1);
  for (int t = 0; t < 5; ++t) {
    const double before = d.power_sum(1);
    d.accumulate(a);
    EXPECT_NEAR(d.power_sum(1) - before, 1.0 + 2.0 * t, 1e-12);
  }
  EXPECT_THROW(e.accumulate(CVector::Zero(3)), DomainError);
}

TEST(TemporalEnsembleTest, MonotoneAndBoundedBelow) {
  Rng rng(26);
  TemporalEnsemble e(6, 2);
  double prev = 0.0;
  for (int t = 1; t <= 60; ++t) {
    e.accumulate(sample_haar_state(6, rng));
    EXPECT_GE(e.power_sum(2), static_cast<double>(t) - 1e-9);
    EXPECT_GE(e.power_sum(2), prev);
    prev = e.power_sum(2);
  }
}

TEST(Bounds, Values) {
  EXPECT_NEAR(bound_B(16), 0.015949, 5e-7);
  EXPECT_NEAR(hs_lower_bound(16), 6.359e-5, 5e-9);
  const double asymptotic = (1.0 - 1.0 / std::sqrt(2.0)) / 1e4;
  EXPECT_NEAR(bound_B(10000) / asymptotic, 1.0, 0.01);
  EXPECT_NEAR(cross_haar_distance(16, 15, 1), 1.0 / 240, 1e-15);
  EXPECT_NEAR(cross_haar_distance(16, 15, 2), 1.0 / 120 - 1.0 / 136, 1e-15);
  EXPECT_EQ(cross_haar_distance(9, 9, 3), 0.0);
}

TEST(Bounds, CrossDistanceMatchesDenseMoments) {
  // Haar moment on a coordinate subspace embedded in C^D vs the full one.
  for (int k : {1, 2}) {
    const Index dim = 4, sub = 3;
    const MomentMatrix full = haar_moment_dense(dim, k);
    const MomentMatrix small = haar_moment_dense(sub, k);
    const auto big = static_cast<Eigen::Index>(k == 1 ? dim : dim * dim);
    CMatrix embedded = CMatrix::Zero(big, big);
    auto lift = [&](Eigen::Index i) { return k == 1 ? i : (i / sub) * dim + (i % sub); };
    for (Eigen::Index r = 0; r < small.matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < small.matrix.cols(); ++c) embedded(lift(r), lift(c)) = small.matrix(r, c);
    }
    const double dense = hs_distance_sq(MomentMatrix{dim, k, embedded}, full);
    EXPECT_NEAR(cross_haar_distance(dim, sub, k), dense, 1e-14) << "k=" << k;
  }
}
