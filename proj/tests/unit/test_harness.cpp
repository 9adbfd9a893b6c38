#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "odp/harness.hpp"
#include "odp/problem_config.hpp"

using namespace odp;
using json = nlohmann::json;

namespace {

ExperimentConfig bst_config(int n, Algorithm a, std::size_t horizon, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.problem = make_problem(build_bst({n}));
  cfg.algorithm = a;
  cfg.horizon = horizon;
  cfg.seed = seed;
  return cfg;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(TuneEta, FormulaValues) {
  const auto bst5 = build_bst({5});
  EXPECT_NEAR(tune_eta(Algorithm::Eh, 100, bst5.dag, 5.0, 10.0), std::sqrt(2 * std::log(42.0) / 100) / 5, 1e-15);
  EXPECT_NEAR(tune_eta(Algorithm::Eh, 100, bst5.dag, 5.0, 10.0), 0.054682, 1e-6);

  const auto ks = build_knapsack({1, {1}});  // two objects
  EXPECT_NEAR(tune_eta(Algorithm::Eh, 2, ks.dag, 1.0, 1.0), 0.8326, 5e-5);
  EXPECT_NEAR(tune_eta(Algorithm::HedgeOracle, 2, ks.dag, 1.0, 1.0), std::sqrt(std::log(2.0)), 1e-15);

  const double d = 10.0, v = bst5.dag.num_vertices();
  const double delta0 = 2 * d * std::log(v) + d * std::log(d);
  EXPECT_NEAR(tune_eta(Algorithm::Ch, 100, bst5.dag, 5.0, d), std::sqrt(2 * delta0 / (100 * 5.0)), 1e-15);

  EXPECT_GT(tune_eta(Algorithm::Eh, 100, bst5.dag, 5.0, 10.0), tune_eta(Algorithm::Eh, 1000000, bst5.dag, 5.0, 10.0));
  EXPECT_THROW(tune_eta(Algorithm::Eh, 10, build_bst({1}).dag, 1.0, 2.0), InvalidArgument);
  EXPECT_THROW(tune_eta(Algorithm::Fpl, 10, bst5.dag, 5.0, 10.0), InvalidArgument);
}

TEST(RegretBound, ExpandedHedge) {
  const auto prob = make_problem(build_bst({5}));
  const double b = 5.0, ln_n = std::log(42.0);
  EXPECT_NEAR(regret_bound(Algorithm::Eh, 2000, prob), b * std::sqrt(2 * 2000 * ln_n) + b * ln_n, 1e-9);
  EXPECT_TRUE(std::isnan(regret_bound(Algorithm::Fpl, 2000, prob)));
}

TEST(ComputeRegret, ConstantLossExample) {
  Trace t;
  for (std::size_t i = 1; i <= 10; ++i) {
    t.records.push_back({i, 1.0});
    t.cum_loss += 1.0;
  }
  t.l_star = 8.0;
  EXPECT_DOUBLE_EQ(compute_regret(t), 2.0);
}

TEST(RunExperiment, ReproducibleExceptWallTime) {
  for (Algorithm a : {Algorithm::Eh, Algorithm::Ch, Algorithm::Fpl, Algorithm::HedgeOracle}) {
    const auto cfg = bst_config(3, a, 60, 7);
    const Trace x = run_experiment(cfg), y = run_experiment(cfg);
    ASSERT_EQ(x.records.size(), y.records.size());
    for (std::size_t i = 0; i < x.records.size(); ++i) {
      EXPECT_EQ(x.records[i].loss, y.records[i].loss);
      EXPECT_EQ(x.records[i].eta, y.records[i].eta);
      EXPECT_EQ(x.records[i].residual, y.records[i].residual);
      EXPECT_EQ(x.records[i].sample_hash, y.records[i].sample_hash);
    }
    EXPECT_EQ(x.regret, y.regret);
    const Trace z = run_experiment(bst_config(3, a, 60, 8));
    EXPECT_NE(x.cum_loss, z.cum_loss) << algorithm_name(a);
  }
}

TEST(RunExperiment, SingleTrial) {
  for (Algorithm a : {Algorithm::Eh, Algorithm::Ch, Algorithm::Fpl, Algorithm::HedgeOracle}) {
    const Trace t = run_experiment(bst_config(3, a, 1, 3));
    ASSERT_EQ(t.records.size(), 1u);
    EXPECT_EQ(t.regret, t.records[0].loss - t.l_star);
    EXPECT_GE(t.regret, -1e-12) << algorithm_name(a);
  }
}

TEST(RunExperiment, ExpandedHedgeMatchesExplicitHedge) {
  const Trace eh = run_experiment(bst_config(3, Algorithm::Eh, 200, 11));
  const Trace oracle = run_experiment(bst_config(3, Algorithm::HedgeOracle, 200, 11));
  ASSERT_EQ(eh.records.size(), oracle.records.size());
  for (std::size_t i = 0; i < eh.records.size(); ++i) EXPECT_NEAR(eh.records[i].loss, oracle.records[i].loss, 1e-9);
  EXPECT_EQ(eh.l_star, oracle.l_star);
}

TEST(RunExperiment, BestFixedObjectInHindsight) {
  const auto cfg = bst_config(4, Algorithm::Eh, 100, 5);
  const Trace t = run_experiment(cfg);
  for (const auto& pi : enumerate_multipaths(cfg.problem.dag)) {
    const double replay = multipath_loss(pi, t.summed_edge_losses);
    EXPECT_GE(replay - t.l_star, -1e-9);
  }
  EXPECT_NEAR(multipath_loss(t.best, t.summed_edge_losses), t.l_star, 1e-9);
}

TEST(RunExperiment, ShiftingOptimumPenalizesEveryFixedObject) {
  // Two unit items, capacity 1: objects {}, {1}, {2}. Profits alternate so
  // the per-trial optimum switches every trial.
  json seq;
  for (int t = 0; t < 20; ++t) seq["trials"].push_back(t % 2 ? json::array({0.0, 1.0}) : json::array({1.0, 0.0}));
  const auto path = write_temp("odp-alternating.json", seq.dump());
  ExperimentConfig cfg;
  cfg.problem = make_problem(build_knapsack({1, {1, 1}}));
  cfg.algorithm = Algorithm::Eh;
  cfg.horizon = 20;
  cfg.adversary.kind = AdversaryKind::FixedSequenceFile;
  cfg.adversary.sequence_file = path.string();
  const Trace t = run_experiment(cfg);
  // loss = 2 - gain; the per-trial optimum loses 1 every trial
  EXPECT_DOUBLE_EQ(t.l_star, 30.0);
  for (const auto& pi : enumerate_multipaths(cfg.problem.dag))
    EXPECT_GT(multipath_loss(pi, t.summed_edge_losses) - 20.0, 0.0);
  std::filesystem::remove(path);
}

TEST(RunExperiment, FixedSequenceErrors) {
  const auto path = write_temp("odp-short.json", R"({"trials": [[0.2, 0.3, 0.1, 0.2, 0.2]]})");
  auto cfg = bst_config(2, Algorithm::Eh, 3, 1);
  cfg.adversary.kind = AdversaryKind::FixedSequenceFile;
  cfg.adversary.sequence_file = path.string();
  EXPECT_THROW(run_experiment(cfg), Error);
  cfg.horizon = 1;
  EXPECT_NO_THROW(run_experiment(cfg));
  cfg.problem = make_problem(build_bst({3}));
  EXPECT_THROW(run_experiment(cfg), Error);
  std::filesystem::remove(path);
}

TEST(RunExperiment, PiecewiseShiftIsDeterministicAndBounded) {
  auto cfg = bst_config(3, Algorithm::Ch, 100, 2);
  cfg.adversary.kind = AdversaryKind::PiecewiseShift;
  const Trace t = run_experiment(cfg);
  const auto seq = adversary_sequence(cfg.adversary, cfg.problem, 100, 2);
  ASSERT_EQ(seq.size(), 100u);
  EXPECT_EQ(seq, adversary_sequence(cfg.adversary, cfg.problem, 100, 2));
  for (const auto& x : seq) {
    double s = 0.0;
    for (double v : x) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  EXPECT_TRUE(t.within_bound);
}

TEST(RunExperiment, AdversaryIndependentOfAlgorithm) {
  const Trace a = run_experiment(bst_config(3, Algorithm::Eh, 50, 4));
  const Trace b = run_experiment(bst_config(3, Algorithm::Fpl, 50, 4));
  EXPECT_EQ(a.summed_edge_losses, b.summed_edge_losses);
}

TEST(RunExperiment, FplRefusesMatrixChainByDefault) {
  ExperimentConfig cfg;
  cfg.problem = make_problem(build_matrix_chain({3, 4}));
  cfg.algorithm = Algorithm::Fpl;
  cfg.horizon = 5;
  EXPECT_THROW(run_experiment(cfg), InvalidArgument);
  cfg.fpl_matrix_chain = true;
  EXPECT_NO_THROW(run_experiment(cfg));
}

TEST(RunExperiment, HandSetEtaHasNoBound) {
  auto cfg = bst_config(3, Algorithm::Eh, 20, 1);
  cfg.eta = 0.5;
  const Trace t = run_experiment(cfg);
  EXPECT_TRUE(std::isnan(t.bound));
  for (const auto& r : t.records) EXPECT_EQ(r.eta, 0.5);
}

TEST(TraceOutput, CsvAndSummary) {
  const auto cfg = experiment_from_json(R"({"problem": "bst", "params": {"n": 3}, "algorithm": "ch", "T": 5, "seed": 9})");
  const Trace t = run_experiment(cfg);
  std::ostringstream csv;
  write_trace_csv(csv, t);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,loss,cum_loss,eta,residual,sample_hash,ms");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);

  const json s = json::parse(trace_summary_json(cfg, t));
  for (const char* key : {"config", "L_star", "cum_loss", "regret", "bound", "within_bound", "approximate_trials"})
    EXPECT_TRUE(s.contains(key)) << key;
  EXPECT_EQ(s["config"]["algorithm"], "ch");
  EXPECT_EQ(s["config"]["T"], 5);
  EXPECT_EQ(s["config"]["seed"], 9);
  EXPECT_DOUBLE_EQ(s["regret"].get<double>(), t.regret);
}

TEST(ConfigParsing, ExperimentFields) {
  const auto cfg = experiment_from_json(R"({
    "problem": "rod", "params": {"n": 4}, "algorithm": "fpl", "T": 30, "eta": "auto", "seed": 3,
    "adversary": {"kind": "piecewise_shift", "phases": 3},
    "projection": {"tol": 1e-6, "max_cycles": 50}, "fpl_scale": 2.5})");
  EXPECT_EQ(cfg.problem.kind, "rod");
  EXPECT_EQ(cfg.algorithm, Algorithm::Fpl);
  EXPECT_EQ(cfg.horizon, 30u);
  EXPECT_FALSE(cfg.eta.has_value());
  EXPECT_EQ(cfg.adversary.kind, AdversaryKind::PiecewiseShift);
  EXPECT_EQ(cfg.adversary.phases, 3u);
  EXPECT_EQ(cfg.projection.tol, 1e-6);
  EXPECT_EQ(cfg.projection.max_cycles, 50u);
  EXPECT_EQ(cfg.fpl_scale, 2.5);

  EXPECT_THROW(experiment_from_json(R"({"problem": "bst", "params": {"n": 3}, "algorithm": "nope"})"), InvalidArgument);
  EXPECT_THROW(experiment_from_json(R"({"problem": "bst", "params": {}})"), InvalidArgument);
  EXPECT_THROW(experiment_from_json(R"({"problem": "bst", "params": {"n": 3}, "T": 0})"), InvalidArgument);
  EXPECT_THROW(experiment_from_json("{"), InvalidArgument);
}

TEST(RunCells, MatchesSequentialRuns) {
  std::vector<ExperimentConfig> cells;
  for (std::uint64_t s = 0; s < 6; ++s) cells.push_back(bst_config(3, s % 2 ? Algorithm::Ch : Algorithm::Eh, 30, s));
  const auto parallel = run_cells(cells, 3);
  for (std::size_t i = 0; i < cells.size(); ++i) EXPECT_EQ(parallel[i].cum_loss, run_experiment(cells[i]).cum_loss);
}

TEST(RunExperiment, WithinBoundOnShortIidRuns) {
  for (Algorithm a : {Algorithm::Eh, Algorithm::Ch, Algorithm::HedgeOracle}) {
    const Trace t = run_experiment(bst_config(4, a, 300, 21));
    EXPECT_TRUE(t.within_bound) << algorithm_name(a);
    EXPECT_LE(t.regret, t.bound);
  }
}
