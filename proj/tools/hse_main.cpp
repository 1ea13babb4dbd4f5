// hse: command-line front end for the ergodicity experiments.
//
//   hse run --config cfg.json [--experiment X --n N --d D --t-max T
//           --instances I --seed S --out DIR --k 1,2 --per-decade 30]
//   hse krylov --n N --d D
//   hse selftest
//
// Precedence: experiment preset < config file < command-line flags.
// Exit codes: 0 success, 1 other failure, 2 config error, 3 numerical invariant violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "hse/krylov.hpp"
#include "hse/runner.hpp"
#include "hse/selftest.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunFlags {
  std::string config_path;
  std::optional<std::string> experiment;
  std::optional<int> n_sites;
  std::optional<int> local_dim;
  std::optional<std::uint64_t> horizon;
  std::optional<int> instances;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::vector<int>> moments;
  std::optional<int> per_decade;
};

hse::ExperimentConfig build_config(const RunFlags& flags) {
  std::optional<hse::ExperimentConfig> config;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw hse::ConfigError("cannot open config file " + flags.config_path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw hse::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (flags.experiment && !doc.contains("experiment")) {
      config = hse::config_from_json(doc, hse::preset(hse::parse_experiment_kind(*flags.experiment)));
    } else {
      config = hse::config_from_json(doc);
    }
  }
  if (flags.experiment) {
    const hse::ExperimentKind kind = hse::parse_experiment_kind(*flags.experiment);
    if (!config) config = hse::preset(kind);
    config->experiment = kind;
  }
  if (!config) throw hse::ConfigError("run needs --config or --experiment");
  if (flags.n_sites) config->n_sites = *flags.n_sites;
  if (flags.local_dim) config->local_dim = *flags.local_dim;
  if (flags.horizon) config->horizon = *flags.horizon;
  if (flags.instances) config->instances = *flags.instances;
  if (flags.seed) config->seed = *flags.seed;
  if (flags.out) config->output_dir = *flags.out;
  if (flags.moments) config->moments = *flags.moments;
  if (flags.per_decade) config->per_decade = *flags.per_decade;
  return *config;
}

int run_command(const RunFlags& flags) {
  const hse::ExperimentConfig config = build_config(flags);
  hse::validate(config);
  const hse::RunRecord record = hse::run_experiment(config);
  std::cout << "wrote " << record.files.size() + 1 << " files to " << config.output_dir << " in "
            << record.wall_clock_seconds << " s\n";
  return 0;
}

int krylov_command(int n_sites, int local_dim) {
  if (n_sites < 1 || local_dim < 2) throw hse::ConfigError("krylov needs n >= 1 and d >= 2");
  const hse::KrylovDecomposition k = hse::pair_flip_components(n_sites, local_dim);
  std::cout << hse::krylov_report(k);
  return 0;
}

int selftest_command() {
  const hse::OracleCheck check = hse::oracle_equivalence_check(20, 20240611);
  const bool ok = check.max_error < 1e-10;
  std::cout << (ok ? "PASS" : "FAIL") << " oracle equivalence: " << check.cases
            << " ensembles, max |gram - dense| = " << check.max_error << "\n";
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert-space ergodicity experiments"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand("run", "run an experiment and write CSV/JSON outputs");
  run->add_option("--config", flags.config_path, "JSON config file");
  run->add_option("--experiment", flags.experiment, "gbw|scar|multiscar|hsf|symmetry|dee|diagnostics|krylov");
  run->add_option("--n", flags.n_sites, "number of sites");
  run->add_option("--d", flags.local_dim, "local dimension");
  run->add_option("--t-max", flags.horizon, "horizon T");
  run->add_option("--instances", flags.instances, "circuit instances");
  run->add_option("--seed", flags.seed, "master seed");
  run->add_option("--out", flags.out, "output directory");
  run->add_option("--k", flags.moments, "moment orders, comma separated")->delimiter(',');
  run->add_option("--per-decade", flags.per_decade, "checkpoints per decade");

  int krylov_n = 4;
  int krylov_d = 3;
  auto* krylov = app.add_subcommand("krylov", "print the pair-flip sector audit");
  krylov->add_option("--n", krylov_n, "number of sites");
  krylov->add_option("--d", krylov_d, "local dimension");

  auto* selftest = app.add_subcommand("selftest", "check the Gram-route distance against dense moments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return run_command(flags);
    if (krylov->parsed()) return krylov_command(krylov_n, krylov_d);
    if (selftest->parsed()) return selftest_command();
  } catch (const hse::NumericalError& e) {
    std::cerr << "numerical invariant violated: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const hse::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
