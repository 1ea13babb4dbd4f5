#include "hse/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "hse/diagnostics.hpp"
#include "hse/metrics.hpp"
#include "hse/output.hpp"
#include "hse/parallel.hpp"

namespace hse {

namespace {

constexpr Eigen::Index kAccumulateBlock = 64;
constexpr double kLeakageTolerance = 1e-10;

struct NamedKind {
  ExperimentKind kind;
  std::string_view name;
};

constexpr NamedKind kExperimentNames[] = {
    {ExperimentKind::Gbw, "gbw"},           {ExperimentKind::Scar, "scar"},
    {ExperimentKind::Multiscar, "multiscar"}, {ExperimentKind::Hsf, "hsf"},
    {ExperimentKind::Symmetry, "symmetry"}, {ExperimentKind::Dee, "dee"},
    {ExperimentKind::Diagnostics, "diagnostics"}, {ExperimentKind::Krylov, "krylov"},
};

bool is_metric_experiment(ExperimentKind kind) {
  return kind == ExperimentKind::Gbw || kind == ExperimentKind::Scar || kind == ExperimentKind::Multiscar ||
         kind == ExperimentKind::Hsf || kind == ExperimentKind::Symmetry;
}

std::string_view to_string(HaarReference reference) {
  return reference == HaarReference::Uniform ? "uniform" : "sampled";
}

HaarReference parse_haar_reference(std::string_view name) {
  if (name == "uniform") return HaarReference::Uniform;
  if (name == "sampled") return HaarReference::Sampled;
  throw ConfigError("haar_reference must be 'uniform' or 'sampled'");
}

// Parsed form of one initial-state spec.
struct InitialSpec {
  enum class Kind { Zeros, Ones, Plus, Basis, All } kind = Kind::Zeros;
  Index index = 0;
};

InitialSpec parse_initial(const std::string& spec, int n_sites, int local_dim) {
  const Index dim = hilbert_dim(n_sites, local_dim);
  if (spec == "zeros") return {InitialSpec::Kind::Zeros, 0};
  if (spec == "ones") return {InitialSpec::Kind::Ones, 0};
  if (spec == "plus") return {InitialSpec::Kind::Plus, 0};
  if (spec == "all") return {InitialSpec::Kind::All, 0};
  if (spec.rfind("basis:", 0) == 0) {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(spec.substr(6), &used);
    } catch (const std::exception&) {
      throw ConfigError("bad basis index in initial state '" + spec + "'");
    }
    if (used != spec.size() - 6 || value >= dim) throw ConfigError("basis index out of range in '" + spec + "'");
    return {InitialSpec::Kind::Basis, static_cast<Index>(value)};
  }
  if (spec.rfind("digits:", 0) == 0) {
    const std::string digits = spec.substr(7);
    if (static_cast<int>(digits.size()) != n_sites) throw ConfigError("'" + spec + "' needs one digit per site");
    std::vector<int> values;
    for (char c : digits) {
      if (c < '0' || c > '9' || c - '0' >= local_dim) throw ConfigError("digit out of range in '" + spec + "'");
      values.push_back(c - '0');
    }
    return {InitialSpec::Kind::Basis, digits_to_index(values, local_dim)};
  }
  throw ConfigError("unknown initial state '" + spec + "'");
}

std::string basis_label(Index index, int n_sites, int local_dim) {
  std::string label = "digits:";
  for (int digit : index_to_digits(index, n_sites, local_dim)) label += static_cast<char>('0' + digit);
  return label;
}

// Invariant subspace of an initial state, when one is known.
struct StartSubspace {
  Index effective_dim = 0;
  std::optional<std::vector<Index>> sector;  // basis-index sector, for pair-flip starts
};

StartSubspace subspace_for(const ExperimentConfig& config, const StateVector& state,
                           const std::optional<KrylovDecomposition>& krylov, const std::optional<CMatrix>& scar_basis) {
  const Index dim = state.dim();
  if (!config.subspace) return {dim, std::nullopt};
  if (krylov) {
    Index nonzero = 0;
    Index where = 0;
    for (Index i = 0; i < dim; ++i) {
      if (std::abs(state[i]) > 0.0) {
        ++nonzero;
        where = i;
      }
    }
    if (nonzero == 1) {
      const auto& sector = krylov->sector_containing(where);
      return {sector.size(), sector};
    }
    return {dim, std::nullopt};
  }
  if (scar_basis && scar_basis->cols() > 0) {
    const double weight = (scar_basis->adjoint() * state.amplitudes()).squaredNorm();
    // A start inside the scar space is a fixed point: a one-state ensemble.
    if (weight > 1.0 - kLeakageTolerance) return {1, std::nullopt};
    if (weight < kLeakageTolerance) return {dim - static_cast<Index>(scar_basis->cols()), std::nullopt};
  }
  return {dim, std::nullopt};
}

std::vector<MetricRow> run_metric_instance(const ExperimentConfig& config, const CircuitModel& circuit,
                                           const std::vector<std::pair<std::string, StateVector>>& starts,
                                           const std::vector<std::uint64_t>& checkpoints,
                                           const std::optional<KrylovDecomposition>& krylov,
                                           const std::optional<CMatrix>& scar_basis) {
  const int k_max = *std::max_element(config.moments.begin(), config.moments.end());
  std::vector<MetricRow> rows;
  for (const auto& [label, initial] : starts) {
    const Index dim = initial.dim();
    const StartSubspace sub = subspace_for(config, initial, krylov, scar_basis);
    const Index acc_dim = sub.sector ? sub.sector->size() : dim;
    std::vector<bool> member;
    if (sub.sector) {
      member.assign(dim, false);
      for (Index i : *sub.sector) member[i] = true;
    }

    TemporalEnsemble ensemble(acc_dim, k_max);
    CMatrix buffer(static_cast<Eigen::Index>(acc_dim), kAccumulateBlock);
    Eigen::Index filled = 0;
    StateVector state = initial;
    std::size_t next = 0;
    const std::uint64_t horizon = checkpoints.back();

    for (std::uint64_t t = 0; t < horizon; ++t) {
      if (sub.sector) {
        double outside = 0.0;
        for (Index i = 0; i < dim; ++i) {
          if (!member[i]) outside += std::norm(state[i]);
        }
        if (outside > kLeakageTolerance) {
          throw NumericalError("state '" + label + "' leaked " + format_double(outside) + " out of its sector");
        }
        for (Index j = 0; j < acc_dim; ++j) buffer(static_cast<Eigen::Index>(j), filled) = state[(*sub.sector)[j]];
      } else {
        buffer.col(filled) = state.amplitudes();
      }
      ++filled;
      const bool at_checkpoint = t + 1 == checkpoints[next];
      if (filled == kAccumulateBlock || at_checkpoint) {
        ensemble.accumulate_block(buffer.leftCols(filled));
        filled = 0;
      }
      if (at_checkpoint) {
        for (int k : config.moments) {
          MetricRow row;
          row.initial = label;
          row.horizon = t + 1;
          row.order = k;
          row.delta_full = delta_gram(ensemble, k, dim);
          row.delta_subspace = delta_gram(ensemble, k, sub.effective_dim);
          row.bound_lb = hs_lower_bound(dim);
          row.cross_bound = cross_haar_distance(dim, sub.effective_dim, k);
          row.subspace_dim = sub.effective_dim;
          rows.push_back(std::move(row));
        }
        ++next;
      }
      if (t + 1 < horizon) {
        circuit.step(state, drive_label(t));
        if (std::abs(state.norm() - 1.0) > 1e-9) throw NumericalError("state norm drifted beyond 1e-9");
      }
    }
  }
  return rows;
}

std::vector<std::uint64_t> with_zero(const std::vector<std::uint64_t>& grid) {
  std::vector<std::uint64_t> times{0};
  times.insert(times.end(), grid.begin(), grid.end());
  return times;
}

nlohmann::ordered_json files_json(const std::vector<OutputFile>& files) {
  auto list = nlohmann::ordered_json::array();
  for (const auto& f : files) list.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return list;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& entry : kExperimentNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& entry : kExperimentNames) {
    if (entry.name == name) return entry.kind;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig preset(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::Gbw:
      c.instances = 100;
      c.initial_states = {"zeros", "plus"};
      break;
    case ExperimentKind::Scar:
      c.instances = 100;
      c.initial_states = {"zeros", "ones"};
      c.projector = ProjectorKind::P1;
      break;
    case ExperimentKind::Multiscar:
      c.local_dim = 3;
      c.moments = {1};
      c.initial_states = {"digits:2222"};
      c.projector = ProjectorKind::P1;
      break;
    case ExperimentKind::Hsf:
      c.local_dim = 3;
      c.initial_states = {"all"};
      break;
    case ExperimentKind::Symmetry:
      c.local_dim = 2;
      c.initial_states = {"all"};
      break;
    case ExperimentKind::Dee:
      c.moments = {};
      c.family = "generic";
      break;
    case ExperimentKind::Diagnostics:
      c.horizon = 1000;
      c.instances = 10;
      c.moments = {};
      c.family = "generic";
      c.initial_states = {"zeros", "plus"};
      break;
    case ExperimentKind::Krylov:
      c.local_dim = 3;
      c.moments = {};
      c.initial_states = {};
      c.instances = 1;
      c.horizon = 1;
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const nlohmann::json& doc, std::optional<ExperimentConfig> base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c = base.value_or(ExperimentConfig{});
  try {
    if (doc.contains("experiment")) {
      const ExperimentKind kind = parse_experiment_kind(doc.at("experiment").get<std::string>());
      if (!base || base->experiment != kind) c = preset(kind);
    } else if (!base) {
      throw ConfigError("config needs an 'experiment' field");
    }
    for (const auto& [key, value] : doc.items()) {
      if (key == "experiment") continue;
      if (key == "n_sites") c.n_sites = value.get<int>();
      else if (key == "local_dim") c.local_dim = value.get<int>();
      else if (key == "horizon") c.horizon = value.get<std::uint64_t>();
      else if (key == "instances") c.instances = value.get<int>();
      else if (key == "moments") c.moments = value.get<std::vector<int>>();
      else if (key == "initial_states") c.initial_states = value.get<std::vector<std::string>>();
      else if (key == "projector") c.projector = parse_projector_kind(value.get<std::string>());
      else if (key == "subspace") c.subspace = value.get<bool>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "output_dir") c.output_dir = value.get<std::string>();
      else if (key == "per_decade") c.per_decade = value.get<int>();
      else if (key == "workers") c.workers = value.get<std::size_t>();
      else if (key == "family") c.family = value.get<std::string>();
      else if (key == "reference_count") c.reference_count = value.get<Index>();
      else if (key == "epsilon") c.epsilon = value.get<double>();
      else if (key == "repeats") c.repeats = value.get<int>();
      else if (key == "haar_reference") c.haar_reference = parse_haar_reference(value.get<std::string>());
      else if (key == "dee_per_decade") c.dee_per_decade = value.get<int>();
      else if (key == "observable") c.observable = value.get<std::string>();
      else if (key == "observable_site") c.observable_site = value.get<int>();
      else throw ConfigError("unknown config field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json doc;
  doc["experiment"] = std::string(to_string(c.experiment));
  doc["n_sites"] = c.n_sites;
  doc["local_dim"] = c.local_dim;
  doc["horizon"] = c.horizon;
  doc["instances"] = c.instances;
  doc["moments"] = c.moments;
  doc["initial_states"] = c.initial_states;
  doc["projector"] = std::string(to_string(c.projector));
  doc["subspace"] = c.subspace;
  doc["seed"] = c.seed;
  doc["output_dir"] = c.output_dir;
  doc["per_decade"] = c.per_decade;
  doc["workers"] = c.workers;
  doc["family"] = c.family;
  doc["reference_count"] = c.reference_count;
  doc["epsilon"] = c.epsilon;
  doc["repeats"] = c.repeats;
  doc["haar_reference"] = std::string(to_string(c.haar_reference));
  doc["dee_per_decade"] = c.dee_per_decade;
  doc["observable"] = c.observable;
  doc["observable_site"] = c.observable_site;
  return doc;
}

ModelFamily family_for(const ExperimentConfig& c) {
  switch (c.experiment) {
    case ExperimentKind::Gbw: return ModelFamily::generic();
    case ExperimentKind::Scar:
    case ExperimentKind::Multiscar: return ModelFamily::scar(c.projector);
    case ExperimentKind::Hsf:
    case ExperimentKind::Symmetry:
    case ExperimentKind::Krylov: return ModelFamily::pair_flip();
    case ExperimentKind::Dee:
    case ExperimentKind::Diagnostics:
      if (c.family == "generic") return ModelFamily::generic();
      if (c.family == "scar") return ModelFamily::scar(c.projector);
      if (c.family == "pair_flip") return ModelFamily::pair_flip();
      throw ConfigError("family must be generic, scar or pair_flip");
  }
  throw ConfigError("unknown experiment");
}

void validate(const ExperimentConfig& c) {
  if (c.n_sites < 2) throw ConfigError("n_sites must be >= 2");
  if (c.local_dim < 2) throw ConfigError("local_dim must be >= 2");
  Index dim = 0;
  try {
    dim = hilbert_dim(c.n_sites, c.local_dim);
  } catch (const std::exception&) {
    throw ConfigError("d^N overflows");
  }
  if (dim > kKrylovDenseCap) throw ConfigError("d^N exceeds the dense cap of 1e6");
  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (c.instances < 1) throw ConfigError("instances must be >= 1");
  if (c.per_decade < 1) throw ConfigError("per_decade must be >= 1");
  for (int k : c.moments) {
    if (k < 1) throw ConfigError("every moment order k must be >= 1");
  }
  if (is_metric_experiment(c.experiment) && c.moments.empty()) throw ConfigError("moments must not be empty");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");

  const ModelFamily family = family_for(c);
  if (family.kind == FamilyKind::Scar) {
    if ((c.projector == ProjectorKind::Pexp || c.projector == ProjectorKind::Plin) && c.local_dim < 3) {
      throw ConfigError("Pexp and Plin projectors need local_dim >= 3");
    }
    if (dim > 4096) throw ConfigError("scar runs need d^N <= 4096 for the scar-space search");
  }
  if (c.experiment == ExperimentKind::Hsf && c.local_dim < 3) throw ConfigError("hsf needs local_dim >= 3");
  if (c.experiment == ExperimentKind::Symmetry && c.local_dim != 2) throw ConfigError("symmetry needs local_dim = 2");

  if (c.experiment != ExperimentKind::Krylov) {
    if (c.initial_states.empty()) throw ConfigError("initial_states must not be empty");
    for (const auto& spec : c.initial_states) parse_initial(spec, c.n_sites, c.local_dim);
  }
  if (c.experiment == ExperimentKind::Dee) {
    if (c.reference_count < 2) throw ConfigError("reference_count must be >= 2");
    if (c.epsilon < 0.0 || c.epsilon >= 1.0) throw ConfigError("epsilon must lie in [0, 1)");
    if (c.repeats < 1) throw ConfigError("repeats must be >= 1");
    if (c.dee_per_decade < 1) throw ConfigError("dee_per_decade must be >= 1");
  }
  if (c.experiment == ExperimentKind::Diagnostics) {
    if (c.n_sites % 2 != 0) throw ConfigError("diagnostics need an even number of sites");
    if (dim > kOperatorDenseCap) throw ConfigError("diagnostics need d^N <= 256");
    ObservableKind kind;
    try {
      kind = parse_observable_kind(c.observable);
      local_observable(kind, c.local_dim);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (c.observable_site >= c.n_sites) throw ConfigError("observable_site out of range");
  }
}

std::vector<std::pair<std::string, StateVector>> resolve_initial_states(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, StateVector>> states;
  const Index dim = hilbert_dim(c.n_sites, c.local_dim);
  for (const auto& spec : c.initial_states) {
    const InitialSpec parsed = parse_initial(spec, c.n_sites, c.local_dim);
    switch (parsed.kind) {
      case InitialSpec::Kind::Zeros:
        states.emplace_back(spec, new_basis_state(c.n_sites, c.local_dim, Index{0}));
        break;
      case InitialSpec::Kind::Ones: {
        const std::vector<int> ones(static_cast<std::size_t>(c.n_sites), 1);
        states.emplace_back(spec, new_basis_state(c.n_sites, c.local_dim, ones));
        break;
      }
      case InitialSpec::Kind::Plus:
        states.emplace_back(spec, new_plus_state(c.n_sites, c.local_dim));
        break;
      case InitialSpec::Kind::Basis:
        states.emplace_back(spec, new_basis_state(c.n_sites, c.local_dim, parsed.index));
        break;
      case InitialSpec::Kind::All:
        for (Index i = 0; i < dim; ++i) {
          states.emplace_back(basis_label(i, c.n_sites, c.local_dim), new_basis_state(c.n_sites, c.local_dim, i));
        }
        break;
    }
  }
  return states;
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon, int per_decade) {
  if (horizon < 1) throw DomainError("checkpoint grid needs horizon >= 1");
  if (per_decade < 1) throw DomainError("checkpoint grid needs per_decade >= 1");
  std::vector<std::uint64_t> grid{1};
  for (int i = 1;; ++i) {
    const double target = std::pow(10.0, static_cast<double>(i) / per_decade);
    const auto rounded = static_cast<std::uint64_t>(std::llround(target));
    const std::uint64_t point = std::max(grid.back() + 1, rounded);
    if (point >= horizon) break;
    grid.push_back(point);
  }
  if (grid.back() != horizon) grid.push_back(horizon);
  return grid;
}

Percentiles summarize(std::vector<double> values) {
  if (values.empty()) throw DomainError("cannot summarize an empty sample");
  std::sort(values.begin(), values.end());
  auto quantile = [&values](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  double sum = 0.0;
  for (double v : values) sum += v;
  return {sum / static_cast<double>(values.size()), quantile(0.1), quantile(0.9)};
}

std::vector<AggregateRow> aggregate_instances(const std::vector<std::vector<MetricRow>>& tables) {
  if (tables.empty()) throw DomainError("nothing to aggregate");
  const std::size_t rows = tables.front().size();
  for (const auto& table : tables) {
    if (table.size() != rows) throw DomainError("instance tables have different lengths");
  }
  std::vector<AggregateRow> out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const MetricRow& ref = tables.front()[r];
    std::vector<double> full, sub;
    for (const auto& table : tables) {
      const MetricRow& row = table[r];
      if (row.initial != ref.initial || row.horizon != ref.horizon || row.order != ref.order) {
        throw DomainError("instance checkpoint grids are misaligned");
      }
      full.push_back(row.delta_full);
      sub.push_back(row.delta_subspace);
    }
    AggregateRow agg;
    agg.initial = ref.initial;
    agg.horizon = ref.horizon;
    agg.order = ref.order;
    agg.delta_full = summarize(std::move(full));
    agg.delta_subspace = summarize(std::move(sub));
    agg.bound_lb = ref.bound_lb;
    agg.cross_bound = ref.cross_bound;
    agg.subspace_dim = ref.subspace_dim;
    out.push_back(std::move(agg));
  }
  return out;
}

std::string metric_csv(const std::vector<MetricRow>& rows) {
  CsvTable table({"initial", "T", "k", "delta_full", "delta_subspace", "bound_lb", "cross_bound", "subspace_dim"});
  for (const auto& r : rows) {
    table.add_row({r.initial, std::to_string(r.horizon), std::to_string(r.order), format_double(r.delta_full),
                   format_double(r.delta_subspace), format_double(r.bound_lb), format_double(r.cross_bound),
                   std::to_string(r.subspace_dim)});
  }
  return table.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  CsvTable table({"initial", "T", "k", "delta_full_mean", "delta_full_p10", "delta_full_p90", "delta_subspace_mean",
                  "delta_subspace_p10", "delta_subspace_p90", "bound_lb", "cross_bound", "subspace_dim"});
  for (const auto& r : rows) {
    table.add_row({r.initial, std::to_string(r.horizon), std::to_string(r.order), format_double(r.delta_full.mean),
                   format_double(r.delta_full.p10), format_double(r.delta_full.p90),
                   format_double(r.delta_subspace.mean), format_double(r.delta_subspace.p10),
                   format_double(r.delta_subspace.p90), format_double(r.bound_lb), format_double(r.cross_bound),
                   std::to_string(r.subspace_dim)});
  }
  return table.str();
}

std::string dee_csv(const std::vector<DeeTableRow>& rows, double epsilon, std::uint64_t seed) {
  CsvTable table({"initial", "T", "dee_min", "dee_mean", "dee_max", "m_prime", "epsilon", "seed"});
  for (const auto& r : rows) {
    table.add_row({r.initial, std::to_string(r.row.horizon), format_double(r.row.min), format_double(r.row.mean),
                   format_double(r.row.max), std::to_string(r.row.m_prime), format_double(epsilon),
                   std::to_string(seed)});
  }
  return table.str();
}

std::string series_csv(const std::vector<SeriesRow>& rows, std::string_view model, int instance) {
  CsvTable table({"t", "value", "observable", "model", "instance"});
  for (const auto& r : rows) {
    table.add_row({std::to_string(r.t), format_double(r.value), r.observable, std::string(model), std::to_string(instance)});
  }
  return table.str();
}

std::string krylov_report(const KrylovDecomposition& k) {
  std::ostringstream out;
  out << "pair-flip sectors for N=" << k.n_sites << ", d=" << k.local_dim << "\n";
  out << "  sectors: " << k.sector_count() << "\n";
  for (const auto& [size, count] : k.size_histogram()) out << "  " << count << " x dim " << size << "\n";
  out << "  frozen states: " << k.singleton_count() << " (formula " << frozen_state_count(k.n_sites, k.local_dim)
      << ")\n";
  out << "  commutant dimension formula: " << commutant_dimension(k.n_sites, k.local_dim) << "\n";
  if (k.local_dim >= 3 && k.n_sites % 2 == 0) {
    out << "  largest sector: " << k.largest_sector_size() << " (formula "
        << largest_sector_formula(k.n_sites, k.local_dim) << ")\n";
  } else {
    out << "  largest sector: " << k.largest_sector_size() << "\n";
  }
  return out.str();
}

RunRecord run_experiment(const ExperimentConfig& config, bool write_outputs) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();

  RunRecord record;
  record.config = config;
  record.checkpoints = checkpoint_grid(config.horizon, config.per_decade);
  for (int i = 0; i < config.instances; ++i) record.child_seeds.push_back(child_seed(config.seed, static_cast<std::uint64_t>(i)));

  const std::filesystem::path out_dir(config.output_dir);
  auto emit = [&](const std::string& name, const std::string& content) {
    if (write_outputs) write_file_atomic(out_dir / name, content);
    record.files.push_back({name, sha256_hex(content), content.size()});
  };
  auto write_manifest = [&]() {
    if (!write_outputs) return;
    nlohmann::ordered_json manifest;
    manifest["artifact_version"] = std::string(kArtifactVersion);
    manifest["experiment"] = std::string(to_string(config.experiment));
    manifest["config"] = to_json(config);
    manifest["master_seed"] = config.seed;
    manifest["child_seeds"] = record.child_seeds;
    manifest["checkpoints"] = record.checkpoints;
    manifest["files"] = files_json(record.files);
    manifest["wall_clock_seconds"] = record.wall_clock_seconds;
    manifest["complete"] = record.complete;
    write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  };

  try {
    const ModelFamily family = family_for(config);
    const auto instances = static_cast<std::size_t>(config.instances);

    if (config.experiment == ExperimentKind::Krylov) {
      record.krylov = pair_flip_components(config.n_sites, config.local_dim);
      emit("sectors.json", record.krylov->to_json() + "\n");
      CsvTable table({"dim", "count"});
      for (const auto& [size, count] : record.krylov->size_histogram()) table.add_row({std::to_string(size), std::to_string(count)});
      emit("aggregate.csv", table.str());
    } else if (is_metric_experiment(config.experiment)) {
      const auto starts = resolve_initial_states(config);
      std::optional<KrylovDecomposition> krylov;
      if (family.kind == FamilyKind::PairFlip) krylov = pair_flip_components(config.n_sites, config.local_dim);
      std::optional<CMatrix> scar_basis;
      if (family.kind == FamilyKind::Scar) {
        scar_basis = scar_subspace_basis(scar_projector(config.projector, config.local_dim), config.n_sites);
      }
      record.instance_tables.resize(instances);
      parallel_for(
          instances,
          [&](std::size_t i) {
            Rng rng(record.child_seeds[i]);
            const CircuitModel circuit = build_circuit(family, config.n_sites, config.local_dim, rng);
            record.instance_tables[i] = run_metric_instance(config, circuit, starts, record.checkpoints, krylov, scar_basis);
          },
          config.workers);
      for (std::size_t i = 0; i < instances; ++i) emit("instance_" + std::to_string(i) + ".csv", metric_csv(record.instance_tables[i]));
      record.aggregate = aggregate_instances(record.instance_tables);
      emit("aggregate.csv", aggregate_csv(record.aggregate));
      if (krylov) emit("sectors.json", krylov->to_json() + "\n");
    } else if (config.experiment == ExperimentKind::Dee) {
      const auto starts = resolve_initial_states(config);
      const auto grid = checkpoint_grid(config.horizon, config.dee_per_decade);
      record.dee_tables.resize(instances);
      for (std::size_t i = 0; i < instances; ++i) {
        Rng rng(record.child_seeds[i]);
        const CircuitModel circuit = build_circuit(family, config.n_sites, config.local_dim, rng);
        for (std::size_t s = 0; s < starts.size(); ++s) {
          DeeOptions options;
          options.reference_count = config.reference_count;
          options.epsilon = config.epsilon;
          options.repeats = config.repeats;
          options.reference = config.haar_reference;
          options.checkpoints = grid;
          options.workers = config.workers;
          const Rng dee_rng = rng.split(1 + s);
          for (const DeeRow& row : run_dee_experiment(circuit, starts[s].second, config.horizon, options, dee_rng)) {
            record.dee_tables[i].push_back({starts[s].first, row});
          }
        }
        emit("instance_" + std::to_string(i) + ".csv", dee_csv(record.dee_tables[i], config.epsilon, record.child_seeds[i]));
      }
      // Envelope over instances: min of minima, mean of means, max of maxima.
      std::vector<DeeTableRow> envelope = record.dee_tables.front();
      for (std::size_t r = 0; r < envelope.size(); ++r) {
        double mean = 0.0;
        for (const auto& table : record.dee_tables) {
          envelope[r].row.min = std::min(envelope[r].row.min, table[r].row.min);
          envelope[r].row.max = std::max(envelope[r].row.max, table[r].row.max);
          envelope[r].row.m_prime = std::min(envelope[r].row.m_prime, table[r].row.m_prime);
          mean += table[r].row.mean;
        }
        envelope[r].row.mean = mean / static_cast<double>(record.dee_tables.size());
      }
      emit("aggregate.csv", dee_csv(envelope, config.epsilon, config.seed));
    } else if (config.experiment == ExperimentKind::Diagnostics) {
      const auto starts = resolve_initial_states(config);
      const ObservableMatrix obs = local_observable(parse_observable_kind(config.observable), config.local_dim);
      const int site = config.observable_site >= 0 ? config.observable_site : config.n_sites / 2;
      const auto times = with_zero(record.checkpoints);
      record.series_tables.resize(instances);
      parallel_for(
          instances,
          [&](std::size_t i) {
            Rng rng(record.child_seeds[i]);
            const CircuitModel circuit = build_circuit(family, config.n_sites, config.local_dim, rng);
            const auto series = autocorrelator_series(circuit, obs, site, config.horizon + 1);
            auto& rows = record.series_tables[i];
            for (std::uint64_t t : times) rows.push_back({t, series[static_cast<std::size_t>(t)], config.observable});
            for (const auto& [label, initial] : starts) {
              const auto entropy = bipartite_entropy_series(circuit, initial, times);
              for (std::size_t j = 0; j < times.size(); ++j) rows.push_back({times[j], entropy[j], "entropy:" + label});
            }
          },
          config.workers);
      const std::string model = to_string(family);
      for (std::size_t i = 0; i < instances; ++i) {
        emit("instance_" + std::to_string(i) + ".csv", series_csv(record.series_tables[i], model, static_cast<int>(i)));
      }
      CsvTable table({"observable", "t", "mean", "p10", "p90"});
      for (std::size_t r = 0; r < record.series_tables.front().size(); ++r) {
        std::vector<double> values;
        for (const auto& rows : record.series_tables) values.push_back(rows[r].value);
        const Percentiles p = summarize(std::move(values));
        const SeriesRow& ref = record.series_tables.front()[r];
        table.add_row({ref.observable, std::to_string(ref.t), format_double(p.mean), format_double(p.p10), format_double(p.p90)});
      }
      emit("aggregate.csv", table.str());
    }
  } catch (...) {
    record.complete = false;
    record.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
      write_manifest();
    } catch (...) {
    }
    throw;
  }

  record.complete = true;
  record.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_manifest();
  return record;
}

}  // namespace hse
