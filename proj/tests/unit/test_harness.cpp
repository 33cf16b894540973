#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "overparam/harness/config_yaml.hpp"
#include "overparam/harness/plots.hpp"
#include "overparam/harness/sweep.hpp"
#include "overparam/harness/verify.hpp"

using namespace overparam;
using namespace overparam::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("overparam_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult fake_run(Arch a, Index m, double lr, std::uint64_t seed, double test, bool ok = true) {
  RunResult r;
  r.spec = {a, "experiment", m, 100, lr, 0.0, seed, {}};
  r.spec.run_id = make_run_id(r.spec);
  r.log.status = ok ? RunStatus::Ok : RunStatus::Diverged;
  r.test_loss = ok ? test : kNaN;
  r.train_loss = ok ? test / 2 : kNaN;
  r.gen_gap = ok ? test / 2 : kNaN;
  return r;
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig c;
  c.task = Task::Fig1aSweepM;
  c.archs = {Arch::TwoLayer, Arch::ThreeLayerLast};
  c.m_grid = {8, 16};
  c.N_grid = {40};
  c.seeds = {0, 1};
  c.sgd.epochs = 3;
  c.sgd.batch = 10;
  c.sgd.lr = {1e-3, 1e-2};
  c.test_factor = 2;
  c.out = out.string();
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

TEST(Config, DecadeGrid) {
  const auto g = decade_grid(1, 2);
  const std::vector<double> want{0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  ASSERT_EQ(g.size(), want.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(g[i], want[i]);
}

TEST(Config, EnumRoundTrip) {
  for (Arch a : all_archs()) EXPECT_EQ(arch_from_string(to_string(a)), a);
  for (Task t : {Task::Fig1aSweepM, Task::Fig1bSweepN, Task::Fig6Tanh, Task::Fig7Regularizer, Task::CouplingSuite,
                 Task::ConstructSuite})
    EXPECT_EQ(task_from_string(to_string(t)), t);
  EXPECT_THROW(arch_from_string("4layer"), ConfigError);
  EXPECT_THROW(task_from_string("fig9"), ConfigError);
}

TEST(Config, ParsesFullDocument) {
  const auto c = parse_config_string(R"(
task: fig1a-sweep-m
archs: [3layer, 2layer-last]
grid: {m: [100, 400], N: 500}
seeds: [3, 4]
sgd:
  epochs: 12
  batch: 25
  lr: {decades: [2, 3]}
  wd: [0, 1.0e-4]
  lr_by_arch: {2layer-last: [1, 2]}
precision: double
out: somewhere
)");
  EXPECT_EQ(c.task, Task::Fig1aSweepM);
  EXPECT_EQ(c.archs, (std::vector<Arch>{Arch::ThreeLayer, Arch::TwoLayerLast}));
  EXPECT_EQ(c.m_grid, (std::vector<Index>{100, 400}));
  EXPECT_EQ(c.N_grid, (std::vector<Index>{500}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(c.sgd.epochs, 12);
  EXPECT_EQ(c.sgd.batch, 25);
  EXPECT_EQ(c.sgd.lr.size(), 6u);
  EXPECT_EQ(c.sgd.wd, (std::vector<double>{0, 1e-4}));
  EXPECT_EQ(lr_list(c, Arch::TwoLayerLast), (std::vector<double>{1, 2}));
  EXPECT_EQ(lr_list(c, Arch::ThreeLayer).size(), 6u);
  EXPECT_EQ(c.precision, "double");
  EXPECT_EQ(c.out, "somewhere");
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, TaskDefaults) {
  auto c = parse_config_string("task: fig1b-sweep-N\n");
  EXPECT_EQ(c.m_grid, (std::vector<Index>{2000}));
  EXPECT_EQ(c.N_grid.size(), 5u);
  c = parse_config_string("task: fig6-tanh\n");
  EXPECT_EQ(c.target, "tanh-fig6");
  c = parse_config_string("task: fig7-regularizer\n");
  EXPECT_EQ(c.archs, (std::vector<Arch>{Arch::ThreeLayer}));
  EXPECT_EQ(c.regularizers.size(), 2u);
}

TEST(Config, UnknownKeysAreErrors) {
  try {
    parse_config_string("task: fig1a-sweep-m\nsgd: {epoch: 3}\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sgd.epoch"), std::string::npos);
  }
  EXPECT_THROW(parse_config_string("task: fig1a-sweep-m\nwidth: 3\n"), ConfigError);
  EXPECT_THROW(parse_config_string("task: construct-suite\nconstruct: {fits: [{activation: sin, k: 3}]}\n"),
               ConfigError);
  EXPECT_THROW(parse_config_string("task: fig1a-sweep-m\nsgd: {lr: {decades: [1, 2], extra: 1}}\n"), ConfigError);
}

TEST(Config, BadValuesAreErrors) {
  EXPECT_THROW(parse_config_string(""), ConfigError);
  EXPECT_THROW(parse_config_string("archs: [3layer]\n"), ConfigError);  // no task
  EXPECT_THROW(parse_config_string("task: fig1a-sweep-m\nsgd: {epochs: many}\n"), ConfigError);
  EXPECT_THROW(parse_config_string("task: fig1a-sweep-m\nsgd: {lr: {decades: [3, 1]}}\n"), ConfigError);
  EXPECT_THROW(parse_config_string("task: fig1a-sweep-m\nsgd: {lr_by_arch: {5layer: [1]}}\n"), ConfigError);
  EXPECT_THROW(parse_config_string("task: [oops\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST(Config, ValidateRejects) {
  auto base = parse_config_string("task: fig1a-sweep-m\n");
  auto c = base;
  c.seeds.clear();
  EXPECT_THROW(validate(c), ConfigError);
  c = base;
  c.d = 5;
  EXPECT_THROW(validate(c), ConfigError);
  c = base;
  c.sgd.lr = {0.0};
  EXPECT_THROW(validate(c), ConfigError);
  c = base;
  c.precision = "half";
  EXPECT_THROW(validate(c), ConfigError);
  c = base;
  c.sgd.loss = "hinge";
  EXPECT_THROW(validate(c), ConfigError);
  c = parse_config_string("task: fig7-regularizer\n");
  c.archs = {Arch::ThreeLayerNtk};
  EXPECT_THROW(validate(c), ConfigError);
  c = parse_config_string("task: fig7-regularizer\nregularizers: [l1]\n");
  EXPECT_THROW(validate(c), ConfigError);
  c = parse_config_string("task: coupling-suite\ncoupling: {mode: gentle}\n");
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, FullScaleGrids) {
  auto c = parse_config_string("task: fig1a-sweep-m\nsgd: {lr_by_arch: {3layer: [1]}}\n");
  apply_full_scale(c);
  EXPECT_EQ(c.sgd.epochs, 800);
  EXPECT_EQ(c.sgd.lr_drop_epoch, 400);
  EXPECT_EQ(c.sgd.lr.size(), 15u);
  EXPECT_DOUBLE_EQ(c.sgd.lr.front(), 5.0);
  EXPECT_EQ(c.sgd.wd.size(), 13u);
  EXPECT_EQ(c.sgd.wd.back(), 0.0);
  EXPECT_TRUE(c.sgd.lr_by_arch.empty());
}

TEST(Config, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = parse_config_string("task: fig1a-sweep-m\nseeds: [0, 1]\n");
  auto b = parse_config_string("task: fig1a-sweep-m\nseeds: [0, 1]\nout: elsewhere\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.sgd.epochs += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.seeds = {0, 2};
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, ShippedConfigsLoad) {
  for (const char* name : {"fig1a", "fig1b", "fig6", "fig7", "coupling", "construct", "smoke"}) {
    const auto path = fs::path(OVERPARAM_SOURCE_DIR) / "configs" / (std::string(name) + ".yaml");
    SCOPED_TRACE(path.string());
    ExperimentConfig c;
    ASSERT_NO_THROW(c = load_config(path.string()));
    EXPECT_NO_THROW(validate(c));
  }
}

// ---------------------------------------------------------------------------
// Planning and summaries

TEST(Plan, OrderAndCount) {
  auto c = parse_config_string(R"(
task: fig1a-sweep-m
archs: [2layer, 3layer-ntk]
grid: {m: [100, 8000], N: [50, 60]}
seeds: [0, 1, 2]
sgd: {lr: [0.1, 0.01], wd: [0, 0.5]}
)");
  const auto plan = plan_runs(c);
  // 2layer: 2 m * 2 N * 2 lr * 2 wd * 3 seeds; 3layer-ntk drops m=8000.
  EXPECT_EQ(plan.size(), 48u + 24u);
  for (const auto& s : plan)
    if (is_ntk(s.arch)) EXPECT_LE(s.m, kNtkWidthCap);
  EXPECT_EQ(plan[0].run_id, "2layer_experiment_m100_N50_lr0.1_wd0_s0");
  EXPECT_EQ(plan[1].seed, 1u);
  EXPECT_EQ(plan[3].wd, 0.5);
  std::set<std::string> ids;
  for (const auto& s : plan) ids.insert(s.run_id);
  EXPECT_EQ(ids.size(), plan.size());
}

TEST(Plan, RegularizerVariants) {
  auto c = parse_config_string("task: fig7-regularizer\ngrid: {m: [10]}\nseeds: [0]\nsgd: {lr: [0.1], wd: [0.01]}\n");
  const auto plan = plan_runs(c);
  ASSERT_EQ(plan.size(), 2u);
  EXPECT_EQ(plan[0].variant, "frobenius");
  EXPECT_EQ(plan[1].variant, "row-l4");
  EXPECT_EQ(sgd_config(c, plan[0]).penalty, FirstLayerPenalty::None);
  EXPECT_EQ(sgd_config(c, plan[1]).penalty, FirstLayerPenalty::RowL4);
}

TEST(Summary, PicksLowestMedianAndSkipsDiverged) {
  ExperimentConfig c;
  c.archs = {Arch::TwoLayer};
  c.m_grid = {10};
  c.N_grid = {100};
  c.seeds = {0, 1, 2};
  c.sgd.lr = {0.1, 0.01, 0.001};
  std::vector<RunResult> runs;
  // lr 0.1: lowest losses but one seed diverged; lr 0.01 fully ok with median 2; lr 0.001 median 3.
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.1, 0, 0.5));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.1, 1, 0.6));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.1, 2, 0, false));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.01, 0, 1.0));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.01, 1, 2.0));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.01, 2, 9.0));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.001, 0, 3.0));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.001, 1, 3.0));
  runs.push_back(fake_run(Arch::TwoLayer, 10, 0.001, 2, 3.0));
  const auto recs = summarize(c, runs, "h");
  ASSERT_EQ(recs.size(), 1u);
  const auto& r = recs[0];
  EXPECT_EQ(r.status, "ok");
  EXPECT_EQ(r.lr, 0.01);
  EXPECT_EQ(r.median_test_loss, 2.0);
  EXPECT_EQ(r.best_test_loss, 1.0);
  EXPECT_EQ(r.median_train_loss, 1.0);
  EXPECT_EQ(r.seeds_ok, 3);
  EXPECT_EQ(r.runs_diverged, 1);
  EXPECT_EQ(r.seeds, "0;1;2");
  EXPECT_EQ(r.config_hash, "h");
}

TEST(Summary, FallsBackToPartialThenDiverged) {
  ExperimentConfig c;
  c.archs = {Arch::TwoLayer, Arch::ThreeLayer, Arch::TwoLayerNtk};
  c.m_grid = {5000};
  c.N_grid = {100};
  c.seeds = {0, 1};
  c.sgd.lr = {0.1};
  std::vector<RunResult> runs{fake_run(Arch::TwoLayer, 5000, 0.1, 0, 4.0),
                              fake_run(Arch::TwoLayer, 5000, 0.1, 1, 0, false),
                              fake_run(Arch::ThreeLayer, 5000, 0.1, 0, 0, false),
                              fake_run(Arch::ThreeLayer, 5000, 0.1, 1, 0, false)};
  const auto recs = summarize(c, runs, "h");
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].status, "ok");
  EXPECT_EQ(recs[0].median_test_loss, 4.0);
  EXPECT_EQ(recs[0].seeds_ok, 1);
  EXPECT_EQ(recs[1].status, "diverged");
  EXPECT_EQ(recs[1].runs_diverged, 2);
  EXPECT_TRUE(std::isnan(recs[1].median_test_loss));
  EXPECT_EQ(recs[2].status, "skipped");
}

TEST(Summary, CsvRoundTrip) {
  SummaryRecord a;
  a.task = "fig1a-sweep-m";
  a.arch = "3layer";
  a.variant = "experiment";
  a.m = 200;
  a.N = 1000;
  a.lr = 2e-3;
  a.wd = 0;
  a.median_test_loss = 0.123456789012345;
  a.best_test_loss = 0.1;
  a.median_train_loss = 1e-7;
  a.median_gen_gap = -0.25;
  a.seeds_ok = 3;
  a.seeds = "0;1;2";
  a.config_hash = "0123456789abcdef";
  SummaryRecord b = a;
  b.status = "diverged";
  b.median_test_loss = kNaN;
  b.runs_diverged = 3;
  std::stringstream ss;
  write_summary_csv(ss, {a, b});
  const auto back = read_summary_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].arch, a.arch);
  EXPECT_EQ(back[0].m, a.m);
  EXPECT_EQ(back[0].median_test_loss, a.median_test_loss);
  EXPECT_EQ(back[0].median_gen_gap, a.median_gen_gap);
  EXPECT_EQ(back[0].lr, a.lr);
  EXPECT_TRUE(std::isnan(back[0].median_ratio_w));
  EXPECT_EQ(back[0].config_hash, a.config_hash);
  EXPECT_EQ(back[1].status, "diverged");
  EXPECT_TRUE(std::isnan(back[1].median_test_loss));
  EXPECT_EQ(back[1].runs_diverged, 3);

  std::stringstream bad("task,arch\n");
  EXPECT_THROW(read_summary_csv(bad), InvalidInput);
}

TEST(Parallel, CoversEveryIndexAndRethrowsLowest) {
  for (int jobs : {1, 3}) {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    try {
      parallel_for(20, jobs, [](std::size_t i) {
        if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
      });
      FAIL() << "expected a rethrow";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "7");
    }
  }
}

TEST(Sweep, TinySweepIsDeterministicAcrossJobs) {
  const auto d1 = scratch("sweep1"), d3 = scratch("sweep3");
  auto c1 = tiny_config(d1), c3 = tiny_config(d3);
  std::size_t calls = 0;
  const auto s1 = run_sweep(c1, 1, [&](const RunResult&, std::size_t done, std::size_t total) {
    ++calls;
    EXPECT_LE(done, total);
  });
  const auto s3 = run_sweep(c3, 3);
  EXPECT_EQ(calls, plan_runs(c1).size());
  EXPECT_EQ(s1.config_hash, s3.config_hash);
  for (const char* f : {"summary.csv", "runs.csv", "train_log.csv", "config.json"})
    EXPECT_EQ(slurp(d1 / f), slurp(d3 / f)) << f;
  EXPECT_EQ(s1.records.size(), 4u);
  for (const auto& r : s1.records) {
    EXPECT_EQ(r.status, "ok");
    EXPECT_TRUE(std::isfinite(r.median_test_loss));
    EXPECT_EQ(r.version, std::string(kVersion));
  }
  for (const auto& r : s1.runs) {
    EXPECT_TRUE(fs::exists(d1 / "runs" / (r.spec.run_id + ".csv")));
    if (r.spec.arch == Arch::TwoLayer) {
      EXPECT_GE(r.ratio_w, 1.0);
      EXPECT_LE(r.ratio_w, static_cast<double>(r.spec.m));
    }
  }
  std::ifstream in(d1 / "summary.csv");
  const auto back = read_summary_csv(in);
  ASSERT_EQ(back.size(), s1.records.size());
  EXPECT_EQ(back[0].median_test_loss, s1.records[0].median_test_loss);
}

TEST(Sweep, RejectsNonSweepTask) {
  ExperimentConfig c;
  c.task = Task::CouplingSuite;
  EXPECT_THROW(run_sweep(c), ConfigError);
}

// ---------------------------------------------------------------------------
// Plots

TEST(Plots, EmptySummaryIsAnError) {
  EXPECT_THROW(emit_plots({}, scratch("plot_empty")), InvalidInput);
  EXPECT_THROW(emit_plots_from_csv("/nonexistent/summary.csv", scratch("plot_missing")), InvalidInput);
}

TEST(Plots, DeterministicAndOneSeriesPerArch) {
  std::vector<SummaryRecord> recs;
  for (const char* arch : {"2layer", "3layer"})
    for (Index m : {100, 200, 500}) {
      SummaryRecord r;
      r.task = "fig7-regularizer";
      r.arch = arch;
      r.variant = "row-l4";
      r.m = m;
      r.N = 1000;
      r.median_test_loss = 1.0 / static_cast<double>(m);
      r.median_ratio_w = static_cast<double>(m) / 10;
      recs.push_back(r);
    }
  recs[1].status = "diverged";
  const auto dir = scratch("plots");
  const auto paths = emit_plots(recs, dir);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0].filename(), "fig7-regularizer_loss_vs_m.svg");
  EXPECT_EQ(paths[1].filename(), "fig7-regularizer_ratio_vs_m.svg");
  const auto svg = slurp(paths[0]);
  const auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto p = svg.find(needle); p != std::string::npos; p = svg.find(needle, p + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("<polyline"), 2u);
  EXPECT_EQ(count("<circle"), 5u);  // the diverged cell is not drawn
  EXPECT_NE(svg.find(">2layer row-l4<"), std::string::npos);
  EXPECT_NE(svg.find(">500<"), std::string::npos);

  const auto again = scratch("plots_again");
  emit_plots(recs, again);
  EXPECT_EQ(slurp(dir / paths[0].filename()), slurp(again / paths[0].filename()));
  EXPECT_EQ(slurp(dir / paths[1].filename()), slurp(again / paths[1].filename()));
}

// ---------------------------------------------------------------------------
// Verification suites (small sizes; full sizes run in the acceptance binary)

TEST(Verify, UnknownSuite) {
  EXPECT_THROW(run_verification("nope", SuiteOptions{}, scratch("verify_unknown")), ConfigError);
}

TEST(Verify, SmallSuitesPassAndWriteReports) {
  SuiteOptions o;
  o.configs = 10;
  o.directions = 10;
  o.random_matrices = 50;
  const auto dir = scratch("verify");
  for (const char* s : {"interval", "gradients", "pseudo", "bookkeeping", "ntk", "norm-ratio"}) {
    const auto r = run_verification(s, o, dir);
    EXPECT_TRUE(r.passed) << s << ": " << r.to_json().dump();
    const auto j = nlohmann::json::parse(slurp(dir / ("verify_" + std::string(s) + ".json")));
    EXPECT_EQ(j["passed"].get<bool>(), r.passed);
    EXPECT_FALSE(j["checks"].empty());
  }
}

TEST(Verify, FailingCheckIsReported) {
  SuiteOptions o;
  o.coupling.m1 = {200, 800};
  o.coupling.seeds = 2;
  o.slope_lo = 10;  // unreachable
  o.slope_hi = 11;
  const auto r = run_verification("coupling", o, scratch("verify_fail"));
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.failures.empty());
}

TEST(Verify, TaskSuites) {
  EXPECT_EQ(task_suites(Task::CouplingSuite), (std::vector<std::string>{"coupling"}));
  EXPECT_EQ(task_suites(Task::ConstructSuite).size(), 4u);
  for (const auto& n : task_suites(Task::ConstructSuite)) EXPECT_TRUE(suites().count(n)) << n;
}
