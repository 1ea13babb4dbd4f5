#include "hse/ensemble_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hse/haar.hpp"
#include "hse/parallel.hpp"

namespace hse {

namespace {

constexpr Eigen::Index kBinBlock = 512;

double kl_term(double p, double q) { return p * std::log2(p / q); }

}  // namespace

ReferenceSet filter_reference_states(const CMatrix& candidates, double epsilon) {
  if (epsilon < 0.0 || epsilon >= 1.0) throw DomainError("epsilon must lie in [0, 1)");
  if (candidates.cols() < 2) throw DomainError("need at least two reference candidates");

  std::vector<Eigen::Index> kept;
  if (epsilon == 0.0) {
    kept.resize(static_cast<std::size_t>(candidates.cols()));
    for (Eigen::Index i = 0; i < candidates.cols(); ++i) kept[static_cast<std::size_t>(i)] = i;
  } else {
    const CMatrix gram = candidates.adjoint() * candidates;
    const double limit = 1.0 - epsilon;
    for (Eigen::Index i = 0; i < candidates.cols(); ++i) {
      const bool close = std::any_of(kept.begin(), kept.end(), [&](Eigen::Index j) { return std::abs(gram(j, i)) > limit; });
      if (!close) kept.push_back(i);
    }
  }
  if (kept.size() < 2) throw DomainError("fewer than two reference states survive filtering");

  ReferenceSet refs;
  refs.dim = static_cast<Index>(candidates.rows());
  refs.epsilon = epsilon;
  refs.requested = static_cast<Index>(candidates.cols());
  refs.states.resize(candidates.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) refs.states.col(static_cast<Eigen::Index>(c)) = candidates.col(kept[c]);
  return refs;
}

ReferenceSet build_reference_set(Index count, double epsilon, Index dim, Rng& rng) {
  if (count < 2) throw DomainError("reference set needs M >= 2");
  CMatrix candidates(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
  for (Eigen::Index c = 0; c < candidates.cols(); ++c) candidates.col(c) = sample_haar_state(dim, rng);
  return filter_reference_states(candidates, epsilon);
}

std::vector<std::uint32_t> assign_bins(const CMatrix& states, const ReferenceSet& refs) {
  if (static_cast<Index>(states.rows()) != refs.dim) throw DomainError("state and reference dimensions differ");
  std::vector<std::uint32_t> bins(static_cast<std::size_t>(states.cols()));
  for (Eigen::Index start = 0; start < states.cols(); start += kBinBlock) {
    const Eigen::Index width = std::min(kBinBlock, states.cols() - start);
    const CMatrix overlaps = refs.states.adjoint() * states.middleCols(start, width);
    for (Eigen::Index c = 0; c < width; ++c) {
      Eigen::Index best = 0;
      double best_value = -1.0;
      for (Eigen::Index r = 0; r < overlaps.rows(); ++r) {
        const double value = std::norm(overlaps(r, c));
        if (value > best_value) {
          best_value = value;
          best = r;
        }
      }
      bins[static_cast<std::size_t>(start + c)] = static_cast<std::uint32_t>(best);
    }
  }
  return bins;
}

BinHistogram histogram_of(const std::vector<std::uint32_t>& assignments, Index bins, std::uint64_t prefix) {
  if (prefix > assignments.size()) throw DomainError("histogram prefix exceeds the number of binned states");
  BinHistogram hist;
  hist.counts.assign(bins, 0);
  for (std::uint64_t i = 0; i < prefix; ++i) ++hist.counts.at(assignments[static_cast<std::size_t>(i)]);
  hist.total = prefix;
  return hist;
}

BinHistogram bin_states(const CMatrix& states, const ReferenceSet& refs) {
  return histogram_of(assign_bins(states, refs), refs.size(), static_cast<std::uint64_t>(states.cols()));
}

double dee(const BinHistogram& temporal, const BinHistogram& haar) {
  if (temporal.counts.size() != haar.counts.size()) throw DomainError("histograms have different bin counts");
  if (temporal.total == 0) throw DomainError("temporal histogram is empty");
  if (haar.total == 0) throw DomainError("Haar histogram is empty");
  const double bins = static_cast<double>(haar.counts.size());
  const double haar_norm = static_cast<double>(haar.total) + bins;
  double sum = 0.0;
  for (std::size_t j = 0; j < temporal.counts.size(); ++j) {
    if (temporal.counts[j] == 0) continue;
    const double p = static_cast<double>(temporal.counts[j]) / static_cast<double>(temporal.total);
    const double q = (static_cast<double>(haar.counts[j]) + 1.0) / haar_norm;
    sum += kl_term(p, q);
  }
  return -sum;
}

double dee_uniform(const BinHistogram& temporal) {
  if (temporal.total == 0) throw DomainError("temporal histogram is empty");
  const double q = 1.0 / static_cast<double>(temporal.counts.size());
  double sum = 0.0;
  for (std::uint64_t count : temporal.counts) {
    if (count == 0) continue;
    sum += kl_term(static_cast<double>(count) / static_cast<double>(temporal.total), q);
  }
  return -sum;
}

std::vector<DeeRow> run_dee_experiment(const CMatrix& trajectory, const DeeOptions& options, const Rng& rng) {
  if (options.repeats < 1) throw DomainError("need at least one reference-set repeat");
  if (options.checkpoints.empty()) throw DomainError("no DEE checkpoints");
  if (!std::is_sorted(options.checkpoints.begin(), options.checkpoints.end()) || options.checkpoints.front() < 1 ||
      options.checkpoints.back() > static_cast<std::uint64_t>(trajectory.cols())) {
    throw DomainError("DEE checkpoints must be increasing and within the trajectory");
  }
  if (options.subspace && options.reference == HaarReference::Uniform) {
    throw DomainError("a comparison subspace needs the sampled Haar reference");
  }
  const Index dim = static_cast<Index>(trajectory.rows());
  const std::uint64_t horizon = options.checkpoints.back();
  const std::size_t points = options.checkpoints.size();
  const auto repeats = static_cast<std::size_t>(options.repeats);

  // values[repeat][checkpoint]
  std::vector<std::vector<double>> values(repeats, std::vector<double>(points));
  std::vector<Index> m_primes(repeats);

  parallel_for(
      repeats,
      [&](std::size_t r) {
        Rng local = rng.split(r);
        const ReferenceSet refs = build_reference_set(options.reference_count, options.epsilon, dim, local);
        m_primes[r] = refs.size();
        const auto temporal_bins = assign_bins(trajectory.leftCols(static_cast<Eigen::Index>(horizon)), refs);

        std::vector<std::uint32_t> haar_bins;
        if (options.reference == HaarReference::Sampled) {
          CMatrix haar(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(horizon));
          for (Eigen::Index c = 0; c < haar.cols(); ++c) {
            haar.col(c) = options.subspace ? sample_haar_state_in_subspace(*options.subspace, dim, local)
                                           : sample_haar_state(dim, local);
          }
          haar_bins = assign_bins(haar, refs);
        }

        for (std::size_t p = 0; p < points; ++p) {
          const std::uint64_t t = options.checkpoints[p];
          const BinHistogram temporal = histogram_of(temporal_bins, refs.size(), t);
          values[r][p] = options.reference == HaarReference::Uniform
                             ? dee_uniform(temporal)
                             : dee(temporal, histogram_of(haar_bins, refs.size(), t));
        }
      },
      options.workers);

  std::vector<DeeRow> rows;
  rows.reserve(points);
  const Index m_prime = *std::min_element(m_primes.begin(), m_primes.end());
  for (std::size_t p = 0; p < points; ++p) {
    DeeRow row;
    row.horizon = options.checkpoints[p];
    row.min = std::numeric_limits<double>::infinity();
    row.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      row.min = std::min(row.min, values[r][p]);
      row.max = std::max(row.max, values[r][p]);
      sum += values[r][p];
    }
    row.mean = sum / static_cast<double>(repeats);
    row.m_prime = m_prime;
    rows.push_back(row);
  }
  return rows;
}

CMatrix evolve_trajectory(const CircuitModel& circuit, const StateVector& initial, std::uint64_t horizon) {
  if (horizon < 1) throw DomainError("trajectory horizon must be >= 1");
  StateVector state = initial;
  CMatrix trajectory(static_cast<Eigen::Index>(state.dim()), static_cast<Eigen::Index>(horizon));
  trajectory.col(0) = state.amplitudes();
  for (std::uint64_t t = 1; t < horizon; ++t) {
    circuit.step(state, drive_label(t - 1));
    trajectory.col(static_cast<Eigen::Index>(t)) = state.amplitudes();
  }
  return trajectory;
}

std::vector<DeeRow> run_dee_experiment(const CircuitModel& circuit, const StateVector& initial,
                                       std::uint64_t horizon, const DeeOptions& options, const Rng& rng) {
  return run_dee_experiment(evolve_trajectory(circuit, initial, horizon), options, rng);
}

}  // namespace hse
