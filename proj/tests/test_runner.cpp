#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hse/output.hpp"
#include "hse/runner.hpp"

using namespace hse;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hse_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(CheckpointGrid, Examples) {
  EXPECT_EQ(checkpoint_grid(10, 10), (std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
  const auto g = checkpoint_grid(100, 5);
  EXPECT_EQ(g.size(), 11u);
  EXPECT_EQ(g.front(), 1u);
  EXPECT_EQ(g.back(), 100u);
  EXPECT_EQ(checkpoint_grid(1, 7), (std::vector<std::uint64_t>{1}));
  const auto big = checkpoint_grid(12345, 30);
  EXPECT_TRUE(std::adjacent_find(big.begin(), big.end(), [](auto a, auto b) { return a >= b; }) == big.end());
  EXPECT_EQ(big.back(), 12345u);
  EXPECT_THROW(checkpoint_grid(0, 3), DomainError);
}

TEST(Summarize, Percentiles) {
  const Percentiles one = summarize({0.25});
  EXPECT_EQ(one.mean, 0.25);
  EXPECT_EQ(one.p10, 0.25);
  EXPECT_EQ(one.p90, 0.25);
  const Percentiles same = summarize({2.0, 2.0, 2.0});
  EXPECT_EQ(same.p90 - same.p10, 0.0);
  const Percentiles lin = summarize({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0});
  EXPECT_NEAR(lin.p10, 1.0, 1e-15);
  EXPECT_NEAR(lin.p90, 9.0, 1e-15);

  Rng rng(51);
  std::vector<double> draws;
  for (int i = 0; i < 100; ++i) draws.push_back(rng.uniform());
  const Percentiles u = summarize(draws);
  EXPECT_NEAR(u.p10, 0.1, 0.06);
  EXPECT_NEAR(u.p90, 0.9, 0.06);
}

TEST(Aggregate, RejectsMisalignedTables) {
  MetricRow a{"zeros", 1, 1, 0.5, 0.5, 0.0, 0.0, 16};
  MetricRow b = a;
  b.horizon = 2;
  EXPECT_THROW(aggregate_instances({{a}, {b}}), DomainError);
  EXPECT_THROW(aggregate_instances({{a}, {a, a}}), DomainError);
  const auto agg = aggregate_instances({{a}, {a}});
  EXPECT_EQ(agg[0].delta_full.mean, 0.5);
}

TEST(Config, JsonOverridesPreset) {
  const nlohmann::json doc = {{"experiment", "hsf"}, {"horizon", 50}, {"moments", {1}}};
  const ExperimentConfig c = config_from_json(doc);
  EXPECT_EQ(c.experiment, ExperimentKind::Hsf);
  EXPECT_EQ(c.local_dim, 3);
  EXPECT_EQ(c.horizon, 50u);
  EXPECT_EQ(c.initial_states, (std::vector<std::string>{"all"}));
  const ExperimentConfig round = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(round), to_json(c));
}

TEST(Config, Validation) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "nope"}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "gbw"}, {"colour", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"experiment", "gbw"}, {"horizon", "long"}}), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"horizon", 3}}), ConfigError);

  ExperimentConfig hsf = preset(ExperimentKind::Hsf);
  hsf.local_dim = 2;
  EXPECT_THROW(validate(hsf), ConfigError);
  ExperimentConfig bad = preset(ExperimentKind::Gbw);
  bad.horizon = 0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = preset(ExperimentKind::Gbw);
  bad.moments = {1, 0};
  EXPECT_THROW(validate(bad), ConfigError);
  bad = preset(ExperimentKind::Gbw);
  bad.instances = 0;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = preset(ExperimentKind::Gbw);
  bad.initial_states = {"digits:012"};
  EXPECT_THROW(validate(bad), ConfigError);
  bad = preset(ExperimentKind::Scar);
  bad.projector = ProjectorKind::Plin;
  EXPECT_THROW(validate(bad), ConfigError);
  EXPECT_THROW(run_experiment(bad, false), ConfigError);
}

TEST(Config, InitialStates) {
  ExperimentConfig c = preset(ExperimentKind::Multiscar);
  c.initial_states = {"zeros", "ones", "plus", "basis:5", "digits:0120"};
  const auto states = resolve_initial_states(c);
  ASSERT_EQ(states.size(), 5u);
  EXPECT_EQ(states[1].second[40], Complex(1.0));
  EXPECT_EQ(states[3].second[5], Complex(1.0));
  EXPECT_EQ(states[4].second[15], Complex(1.0));
  c.initial_states = {"all"};
  EXPECT_EQ(resolve_initial_states(c).size(), 81u);
}

TEST(RunExperiment, MetricRunWritesOutputs) {
  ExperimentConfig c = preset(ExperimentKind::Gbw);
  c.instances = 3;
  c.horizon = 200;
  c.output_dir = scratch("gbw").string();
  const RunRecord r = run_experiment(c);
  EXPECT_TRUE(r.complete);
  ASSERT_EQ(r.instance_tables.size(), 3u);
  EXPECT_EQ(r.child_seeds[1], child_seed(c.seed, 1));
  const auto manifest = nlohmann::json::parse(read_file(std::filesystem::path(c.output_dir) / "manifest.json"));
  EXPECT_EQ(manifest["complete"], true);
  EXPECT_EQ(manifest["files"].size(), 4u);
  for (const auto& f : manifest["files"]) {
    const std::string content = read_file(std::filesystem::path(c.output_dir) / f["name"].get<std::string>());
    EXPECT_EQ(sha256_hex(content), f["sha256"]);
  }
  const std::string first = read_file(std::filesystem::path(c.output_dir) / "aggregate.csv");
  run_experiment(c);
  EXPECT_EQ(read_file(std::filesystem::path(c.output_dir) / "aggregate.csv"), first);
  // T = 1 rows equal the single-state value exactly.
  EXPECT_NEAR(r.aggregate[0].delta_full.mean, 0.9375, 1e-15);
}

TEST(RunExperiment, WorkerCountDoesNotChangeResults) {
  ExperimentConfig c = preset(ExperimentKind::Scar);
  c.instances = 4;
  c.horizon = 300;
  c.workers = 1;
  const std::string one = aggregate_csv(run_experiment(c, false).aggregate);
  c.workers = 3;
  EXPECT_EQ(aggregate_csv(run_experiment(c, false).aggregate), one);
}

TEST(RunExperiment, PairFlipSectorsAndSubspaceDims) {
  ExperimentConfig c = preset(ExperimentKind::Hsf);
  c.horizon = 100;
  c.moments = {1};
  const RunRecord r = run_experiment(c, false);
  std::map<Index, int> dims;
  for (const auto& row : r.aggregate) {
    if (row.horizon == 100) ++dims[row.subspace_dim];
  }
  EXPECT_EQ(dims, (std::map<Index, int>{{1, 24}, {7, 42}, {15, 15}}));
}

TEST(RunExperiment, ScarStartsGetSubspaceDims) {
  ExperimentConfig c = preset(ExperimentKind::Scar);
  c.instances = 1;
  c.horizon = 10;
  c.initial_states = {"zeros", "ones", "plus"};
  const RunRecord r = run_experiment(c, false);
  std::map<std::string, Index> dims;
  for (const auto& row : r.aggregate) dims[row.initial] = row.subspace_dim;
  EXPECT_EQ(dims["zeros"], 1u);
  EXPECT_EQ(dims["ones"], 15u);
  EXPECT_EQ(dims["plus"], 16u);
  for (const auto& row : r.aggregate) {
    if (row.initial == "zeros") {
      EXPECT_NEAR(row.delta_subspace.mean, 0.0, 1e-12);
    }
  }
}

TEST(RunExperiment, KrylovDiagnosticsAndDee) {
  ExperimentConfig k = preset(ExperimentKind::Krylov);
  k.output_dir = scratch("krylov").string();
  const RunRecord kr = run_experiment(k);
  ASSERT_TRUE(kr.krylov.has_value());
  EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(k.output_dir) / "sectors.json"));
  EXPECT_NE(krylov_report(*kr.krylov).find("1 x dim 15"), std::string::npos);

  ExperimentConfig d = preset(ExperimentKind::Diagnostics);
  d.horizon = 50;
  d.instances = 2;
  const RunRecord dr = run_experiment(d, false);
  ASSERT_EQ(dr.series_tables.size(), 2u);
  EXPECT_EQ(dr.series_tables[0][0].value, 1.0);

  ExperimentConfig e = preset(ExperimentKind::Dee);
  e.horizon = 100;
  e.reference_count = 50;
  e.repeats = 2;
  const RunRecord er = run_experiment(e, false);
  ASSERT_EQ(er.dee_tables.size(), 1u);
  EXPECT_EQ(er.dee_tables[0].back().row.horizon, 100u);
}

TEST(Output, FormattingAndCsv) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.3333333333333333");
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  EXPECT_EQ(t.str(), "a,b\n1,2\n");
  EXPECT_THROW(t.add_row({"1"}), std::exception);
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
