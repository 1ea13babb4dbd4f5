#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hse/models.hpp"
#include "hse/rng.hpp"
#include "hse/types.hpp"

namespace hse {

// Haar reference states retained after overlap filtering (columns).
struct ReferenceSet {
  Index dim = 0;
  double epsilon = 0.0;
  Index requested = 0;
  CMatrix states;

  Index size() const { return static_cast<Index>(states.cols()); }
};

// Greedy filter: walk the candidates in order and drop any whose overlap
// magnitude with an already kept state exceeds 1 - epsilon. epsilon = 0
// keeps everything. Throws DomainError if fewer than two states survive.
ReferenceSet filter_reference_states(const CMatrix& candidates, double epsilon);

// Draws `count` Haar states of dimension dim and filters them.
ReferenceSet build_reference_set(Index count, double epsilon, Index dim, Rng& rng);

struct BinHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

// Bin index of each column of `states`: the reference maximising |<psi|phi_j>|,
// lowest index on ties. Overlaps are formed block by block with one GEMM each.
std::vector<std::uint32_t> assign_bins(const CMatrix& states, const ReferenceSet& refs);

BinHistogram bin_states(const CMatrix& states, const ReferenceSet& refs);

// Histogram of the first `prefix` assignments.
BinHistogram histogram_of(const std::vector<std::uint32_t>& assignments, Index bins, std::uint64_t prefix);

// -sum_j p_j^T log2(p_j^T / p_j^H), p^T raw frequencies and p^H the Haar
// histogram with one pseudo-count added to every bin.
double dee(const BinHistogram& temporal, const BinHistogram& haar);

// Same with p_j^H = 1/M' for every bin.
double dee_uniform(const BinHistogram& temporal);

enum class HaarReference {
  Uniform,  // p^H = 1/M'
  Sampled,  // fresh Haar states binned alongside the temporal ones
};

struct DeeOptions {
  Index reference_count = 1000;
  double epsilon = 0.1;
  int repeats = 20;
  HaarReference reference = HaarReference::Uniform;
  // Evaluation points T (prefix sizes); must be increasing and <= trajectory length.
  std::vector<std::uint64_t> checkpoints;
  // Sampled mode only: draw the comparison Haar states on this basis subset.
  std::optional<std::vector<Index>> subspace;
  std::size_t workers = 0;
};

struct DeeRow {
  std::uint64_t horizon = 0;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  Index m_prime = 0;  // smallest retained reference count over the repeats
};

// Every repeat draws its own reference set from rng.split(repeat).
std::vector<DeeRow> run_dee_experiment(const CMatrix& trajectory, const DeeOptions& options, const Rng& rng);

// Evolves `initial` for horizon - 1 steps, so the trajectory holds
// |psi(0)>, ..., |psi(T-1)>, then estimates the DEE.
CMatrix evolve_trajectory(const CircuitModel& circuit, const StateVector& initial, std::uint64_t horizon);
std::vector<DeeRow> run_dee_experiment(const CircuitModel& circuit, const StateVector& initial,
                                       std::uint64_t horizon, const DeeOptions& options, const Rng& rng);

}  // namespace hse
