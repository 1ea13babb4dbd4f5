#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hse/ensemble_entropy.hpp"
#include "hse/krylov.hpp"
#include "hse/models.hpp"

namespace hse {

inline constexpr std::string_view kArtifactVersion = "hse 1.0.0";

class ConfigError : public DomainError {
 public:
  explicit ConfigError(const std::string& what) : DomainError(what) {}
};

enum class ExperimentKind { Gbw, Scar, Multiscar, Hsf, Symmetry, Dee, Diagnostics, Krylov };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

// Initial-state specs: "zeros", "ones", "plus", "basis:<index>",
// "digits:<d0d1...>" and "all" (every computational basis state).
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Gbw;
  int n_sites = 4;
  int local_dim = 2;
  std::uint64_t horizon = 10000;
  int instances = 1;
  std::vector<int> moments{1, 2};
  std::vector<std::string> initial_states{"zeros"};
  ProjectorKind projector = ProjectorKind::P1;
  // Report distances to the Haar moments of the start's invariant subspace.
  bool subspace = true;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int per_decade = 30;
  std::size_t workers = 0;  // 0: HSE_THREADS or hardware concurrency

  // dee and diagnostics pick the model with this ("generic", "scar", "pair_flip").
  std::string family = "generic";

  // dee
  Index reference_count = 1000;
  double epsilon = 0.1;
  int repeats = 20;
  HaarReference haar_reference = HaarReference::Uniform;
  int dee_per_decade = 4;

  // diagnostics; site < 0 means N/2
  std::string observable = "sigma_z";
  int observable_site = -1;
};

// Defaults for each experiment, matching the demonstrations they reproduce.
ExperimentConfig preset(ExperimentKind kind);

// Fields present in `doc` override the preset of doc["experiment"] (or of
// `base` if the document has no experiment field).
ExperimentConfig config_from_json(const nlohmann::json& doc, std::optional<ExperimentConfig> base = std::nullopt);
nlohmann::ordered_json to_json(const ExperimentConfig& config);

// Throws ConfigError on any invalid or incompatible field.
void validate(const ExperimentConfig& config);

ModelFamily family_for(const ExperimentConfig& config);

// Expands the config's initial-state specs: (label, state) pairs.
std::vector<std::pair<std::string, StateVector>> resolve_initial_states(const ExperimentConfig& config);

// Increasing integers from 1 to horizon with about `per_decade` points per
// decade: point i is max(previous + 1, round(10^(i/per_decade))); horizon is
// always last.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon, int per_decade);

struct MetricRow {
  std::string initial;
  std::uint64_t horizon = 0;
  int order = 0;
  double delta_full = 0.0;
  double delta_subspace = 0.0;
  double bound_lb = 0.0;
  double cross_bound = 0.0;
  Index subspace_dim = 0;
};

struct Percentiles {
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

// Mean and 10th/90th percentiles, linear interpolation between order statistics.
Percentiles summarize(std::vector<double> values);

struct AggregateRow {
  std::string initial;
  std::uint64_t horizon = 0;
  int order = 0;
  Percentiles delta_full;
  Percentiles delta_subspace;
  double bound_lb = 0.0;
  double cross_bound = 0.0;
  Index subspace_dim = 0;
};

// Rows of every instance must line up (same initial, T, k in the same order).
std::vector<AggregateRow> aggregate_instances(const std::vector<std::vector<MetricRow>>& tables);

struct DeeTableRow {
  std::string initial;
  DeeRow row;
};

struct SeriesRow {
  std::uint64_t t = 0;
  double value = 0.0;
  std::string observable;
};

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunRecord {
  ExperimentConfig config;
  std::vector<std::uint64_t> child_seeds;
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::vector<MetricRow>> instance_tables;
  std::vector<AggregateRow> aggregate;
  std::vector<std::vector<DeeTableRow>> dee_tables;
  std::vector<std::vector<SeriesRow>> series_tables;
  std::optional<KrylovDecomposition> krylov;
  std::vector<OutputFile> files;
  double wall_clock_seconds = 0.0;
  bool complete = false;
};

// Runs the configured experiment. With write_outputs, writes instance_<i>.csv,
// aggregate.csv, manifest.json (and sectors.json for krylov) under
// config.output_dir. Throws ConfigError before any compute on bad input and
// NumericalError when a checked invariant breaks.
RunRecord run_experiment(const ExperimentConfig& config, bool write_outputs = true);

// CSV renderings used for the output files.
std::string metric_csv(const std::vector<MetricRow>& rows);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string dee_csv(const std::vector<DeeTableRow>& rows, double epsilon, std::uint64_t seed);
std::string series_csv(const std::vector<SeriesRow>& rows, std::string_view model, int instance);

// Human-readable sector audit with formula cross-checks.
std::string krylov_report(const KrylovDecomposition& decomposition);

}  // namespace hse
