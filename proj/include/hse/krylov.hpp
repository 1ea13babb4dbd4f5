#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hse/qudit.hpp"

namespace hse {

// Partition of the d^N product basis into dynamically disconnected sectors.
// Sectors are ordered by their smallest basis index; each sector's indices
// are sorted ascending.
struct KrylovDecomposition {
  int n_sites = 0;
  int local_dim = 0;
  std::vector<std::vector<Index>> sectors;
  std::vector<std::size_t> sector_of;  // basis index -> sector id
  // For d = 2 each sector carries its staggered magnetisation.
  std::optional<std::vector<int>> labels;

  std::size_t sector_count() const { return sectors.size(); }
  const std::vector<Index>& sector_containing(Index basis_index) const {
    return sectors.at(sector_of.at(basis_index));
  }
  std::size_t largest_sector_size() const;
  std::size_t singleton_count() const;
  // Histogram: sector size -> number of sectors, ascending by size.
  std::vector<std::pair<std::size_t, std::size_t>> size_histogram() const;

  // {"n_sites":..,"local_dim":..,"sectors":[{"id":0,"label":..,"indices":[..]},..]}
  std::string to_json() const;
};

inline constexpr Index kKrylovDenseCap = 1'000'000;

// Connected components of the pair-flip graph: an adjacent equal pair aa may
// become bb at any bond. Union-find over all d^N basis states.
KrylovDecomposition pair_flip_components(int n_sites, int local_dim, Index cap = kKrylovDenseCap);

// ((d-1)^(N+1) - 1)/(d-2), defined for d >= 3.
std::uint64_t count_sectors_formula(int n_sites, int local_dim);

// Size of the sector of |00...0> for even N and d >= 3: the number of
// length-N words that pair-reduce to nothing, as an exact ballot-number series
//   sum_{k=1}^{N/2} k/(N-k) * C(N-k, N/2) * d^k (d-1)^(N/2-k)
// evaluated in rational arithmetic.
std::uint64_t largest_sector_formula(int n_sites, int local_dim);

// d (d-1)^(N-1): product states with no equal neighbours.
std::uint64_t frozen_state_count(int n_sites, int local_dim);

// ((d-1)^(N+1) - 1)/(d-2) for d >= 3 and N+1 for d = 2.
std::uint64_t commutant_dimension(int n_sites, int local_dim);

// sum_j (-1)^j n_j with n_j the occupation of level |1> at site j (d = 2).
int staggered_sector_label(Index basis_index, int n_sites);

// Probability weight outside the given basis-index set.
double leakage(std::span<const Complex> amplitudes, std::span<const Index> sector);
double leakage(const StateVector& state, std::span<const Index> sector);

}  // namespace hse
