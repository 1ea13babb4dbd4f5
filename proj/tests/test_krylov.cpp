#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <queue>

#include "hse/krylov.hpp"

using namespace hse;

namespace {

// Independent BFS over pair-flip moves; returns sector sizes sorted.
std::vector<std::size_t> bfs_sector_sizes(int n, int d) {
  const Index dim = hilbert_dim(n, d);
  std::vector<bool> seen(dim, false);
  std::vector<std::size_t> sizes;
  for (Index start = 0; start < dim; ++start) {
    if (seen[start]) continue;
    std::size_t size = 0;
    std::queue<Index> queue;
    queue.push(start);
    seen[start] = true;
    while (!queue.empty()) {
      const Index cur = queue.front();
      queue.pop();
      ++size;
      std::vector<int> digits = index_to_digits(cur, n, d);
      for (int bond = 0; bond + 1 < n; ++bond) {
        if (digits[bond] != digits[bond + 1]) continue;
        const int keep = digits[bond];
        for (int b = 0; b < d; ++b) {
          digits[bond] = digits[bond + 1] = b;
          const Index next = digits_to_index(digits, d);
          if (!seen[next]) {
            seen[next] = true;
            queue.push(next);
          }
        }
        digits[bond] = digits[bond + 1] = keep;
      }
    }
    sizes.push_back(size);
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

}  // namespace

TEST(PairFlipComponents, FourQutrits) {
  const KrylovDecomposition k = pair_flip_components(4, 3);
  const std::vector<std::pair<std::size_t, std::size_t>> expected{{1, 24}, {7, 6}, {15, 1}};
  EXPECT_EQ(k.size_histogram(), expected);
  EXPECT_EQ(k.sector_count(), 31u);
  EXPECT_EQ(k.singleton_count(), 24u);
  EXPECT_EQ(k.largest_sector_size(), 15u);
  EXPECT_EQ(k.sector_containing(0).size(), 15u);
}

TEST(PairFlipComponents, TwoQutrits) {
  const KrylovDecomposition k = pair_flip_components(2, 3);
  EXPECT_EQ(k.singleton_count(), 6u);
  EXPECT_EQ(k.sector_containing(0), (std::vector<Index>{0, 4, 8}));
}

TEST(PairFlipComponents, QubitsSplitByStaggeredMagnetisation) {
  const KrylovDecomposition k = pair_flip_components(4, 2);
  std::vector<std::size_t> sizes;
  for (const auto& s : k.sectors) sizes.push_back(s.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 1, 4, 4, 6}));
  ASSERT_TRUE(k.labels.has_value());
  for (std::size_t s = 0; s < k.sectors.size(); ++s) {
    for (Index i : k.sectors[s]) EXPECT_EQ(staggered_sector_label(i, 4), (*k.labels)[s]);
  }
}

TEST(PairFlipComponents, PartitionIsComplete) {
  const KrylovDecomposition k = pair_flip_components(5, 3);
  std::vector<Index> all;
  for (const auto& s : k.sectors) {
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    all.insert(all.end(), s.begin(), s.end());
  }
  std::sort(all.begin(), all.end());
  std::vector<Index> expected(243);
  std::iota(expected.begin(), expected.end(), Index{0});
  EXPECT_EQ(all, expected);
  for (std::size_t s = 1; s < k.sectors.size(); ++s) EXPECT_LT(k.sectors[s - 1].front(), k.sectors[s].front());
}

TEST(PairFlipComponents, MatchesIndependentBfs) {
  for (int d : {2, 3, 4}) {
    for (int n = 2; n <= 6; ++n) {
      const KrylovDecomposition k = pair_flip_components(n, d);
      std::vector<std::size_t> sizes;
      for (const auto& s : k.sectors) sizes.push_back(s.size());
      std::sort(sizes.begin(), sizes.end());
      EXPECT_EQ(sizes, bfs_sector_sizes(n, d)) << "n=" << n << " d=" << d;
    }
  }
}

TEST(Formulas, MatchSectorSearch) {
  for (int d : {3, 4}) {
    for (int n = 2; n <= 6; ++n) {
      const KrylovDecomposition k = pair_flip_components(n, d);
      EXPECT_EQ(count_sectors_formula(n, d), k.sector_count()) << n << "," << d;
      EXPECT_EQ(frozen_state_count(n, d), k.singleton_count()) << n << "," << d;
      EXPECT_EQ(commutant_dimension(n, d), k.sector_count()) << n << "," << d;
      if (n % 2 == 0) {
        EXPECT_EQ(largest_sector_formula(n, d), k.largest_sector_size()) << n << "," << d;
        EXPECT_EQ(largest_sector_formula(n, d), k.sector_containing(0).size());
      }
    }
  }
}

TEST(Formulas, FrozenValues) {
  EXPECT_EQ(count_sectors_formula(4, 3), 31u);
  EXPECT_EQ(count_sectors_formula(2, 3), 7u);
  EXPECT_EQ(count_sectors_formula(6, 3), 127u);
  EXPECT_EQ(largest_sector_formula(4, 3), 15u);
  EXPECT_EQ(largest_sector_formula(2, 3), 3u);
  EXPECT_EQ(largest_sector_formula(6, 3), 87u);
  EXPECT_EQ(frozen_state_count(4, 3), 24u);
  EXPECT_EQ(frozen_state_count(4, 2), 2u);
  EXPECT_EQ(frozen_state_count(5, 3), 48u);
  EXPECT_EQ(commutant_dimension(4, 2), 5u);
  EXPECT_EQ(commutant_dimension(4, 3), 31u);
  EXPECT_EQ(commutant_dimension(3, 4), 40u);
  EXPECT_EQ(commutant_dimension(4, 4), 121u);
}

TEST(Formulas, DomainChecks) {
  EXPECT_THROW(count_sectors_formula(4, 2), DomainError);
  EXPECT_THROW(largest_sector_formula(5, 3), DomainError);
}

TEST(StaggeredLabel, Examples) {
  EXPECT_EQ(staggered_sector_label(0b0000, 4), 0);
  EXPECT_EQ(staggered_sector_label(0b1111, 4), 0);
  EXPECT_EQ(staggered_sector_label(0b0101, 4), -2);
  EXPECT_EQ(staggered_sector_label(0b1010, 4), 2);
  std::map<int, int> classes;
  for (Index i = 0; i < 16; ++i) ++classes[staggered_sector_label(i, 4)];
  EXPECT_EQ(classes, (std::map<int, int>{{-2, 1}, {-1, 4}, {0, 6}, {1, 4}, {2, 1}}));
}

TEST(Leakage, Examples) {
  const KrylovDecomposition k = pair_flip_components(4, 2);
  EXPECT_EQ(leakage(new_basis_state(4, 2, Index{3}), k.sector_containing(3)), 0.0);
  const std::vector<Index> six{0, 3, 5, 6, 9, 10};
  EXPECT_NEAR(leakage(new_plus_state(4, 2), six), 0.625, 1e-15);
}

TEST(Json, RoundTripsSectors) {
  const KrylovDecomposition k = pair_flip_components(2, 3);
  const auto doc = nlohmann::json::parse(k.to_json());
  EXPECT_EQ(doc["n_sites"], 2);
  EXPECT_EQ(doc["local_dim"], 3);
  ASSERT_EQ(doc["sectors"].size(), 7u);
  EXPECT_EQ(doc["sectors"][0]["indices"], nlohmann::json::array({0, 4, 8}));
}
