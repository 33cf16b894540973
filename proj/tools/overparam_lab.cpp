// overparam_lab: config-driven sweeps, single runs, verification suites and plots.
//
//   overparam_lab sweep  --config configs/fig1a.yaml [--jobs 4] [--paper-scale] [--out dir]
//   overparam_lab train  --config configs/fig1a.yaml --arch 3layer --m 2000 --N 1000 --lr 2e-3
//   overparam_lab verify interval [--seed 1] [--config c.yaml]
//   overparam_lab plot   --summary out/summary.csv [--out dir]
//
// Exit status: 0 ok, 1 a verification failed, 2 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "overparam/harness/config_yaml.hpp"
#include "overparam/harness/plots.hpp"
#include "overparam/harness/sweep.hpp"
#include "overparam/harness/verify.hpp"

namespace fs = std::filesystem;
using namespace overparam;
using namespace overparam::harness;

namespace {

constexpr int kUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool full_scale = false;
  std::string out;
};

std::string resolve_out(const Common& g, const std::string& from_config) {
  if (!g.out.empty()) return g.out;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("OVERPARAM_LAB_OUT"); env && *env) return env;
  return "out";
}

ExperimentConfig effective_config(const Common& g, bool required) {
  ExperimentConfig c;
  if (!g.config.empty()) {
    c = load_config(g.config);
  } else if (required) {
    throw ConfigError("--config is required");
  } else {
    apply_task_defaults(c);
  }
  if (g.full_scale) apply_full_scale(c);
  if (g.seed) c.seeds = {*g.seed};
  c.out = resolve_out(g, c.out);
  return c;
}

void print_result(const SuiteResult& r) {
  std::cout << r.suite << ": " << (r.passed ? "PASS" : "FAIL") << '\n';
  for (const auto& c : r.report["checks"]) {
    std::cout << "  [" << (c["passed"].get<bool>() ? "ok" : "FAIL") << "] " << c["name"].get<std::string>();
    if (c.contains("value")) std::cout << "  value=" << c["value"].dump();
    if (c.contains("bound")) std::cout << "  bound=" << c["bound"].dump();
    std::cout << '\n';
  }
}

int run_suites(const std::vector<std::string>& names, const SuiteOptions& o, const fs::path& out) {
  bool ok = true;
  for (const auto& n : names) {
    const auto r = run_verification(n, o, out);
    print_result(r);
    ok = ok && r.passed;
  }
  std::cout << "reports written to " << out.string() << '\n';
  return ok ? 0 : 1;
}

int cmd_sweep(const Common& g) {
  const auto c = effective_config(g, true);
  validate(c);
  if (!is_sweep_task(c.task)) {
    auto o = suite_options(c);
    if (c.task == Task::CouplingSuite) o.coupling_csv = (fs::path(c.out) / "coupling.csv").string();
    fs::create_directories(c.out);
    return run_suites(task_suites(c.task), o, c.out);
  }
  const auto plan = plan_runs(c);
  std::cerr << to_string(c.task) << ": " << plan.size() << " runs, config " << config_hash(c) << ", out "
            << c.out << '\n';
  const auto summary = run_sweep(c, g.jobs, [](const RunResult& r, std::size_t done, std::size_t total) {
    std::cerr << '[' << done << '/' << total << "] " << r.spec.run_id << "  test=" << format_real(r.test_loss)
              << "  " << to_string(r.log.status) << '\n';
  });
  for (const auto& r : summary.records)
    std::cout << r.arch << (r.variant == "experiment" ? "" : " " + r.variant) << "  m=" << r.m << " N=" << r.N
              << "  " << r.status << "  median test=" << format_real(r.median_test_loss)
              << "  lr=" << format_real(r.lr) << " wd=" << format_real(r.wd) << '\n';
  const auto svgs = emit_plots(summary.records, c.out);
  for (const auto& p : svgs) std::cout << "wrote " << p.string() << '\n';
  return 0;
}

struct TrainArgs {
  std::string arch = "3layer";
  std::string variant = "experiment";
  Index m = 0, N = 0;
  double lr = 1e-3, wd = 0.0;
};

int cmd_train(const Common& g, const TrainArgs& a) {
  auto c = effective_config(g, false);
  if (!is_sweep_task(c.task)) throw ConfigError("train: config task must be a sweep task");
  RunSpec s;
  s.arch = arch_from_string(a.arch);
  s.variant = a.variant;
  s.m = a.m > 0 ? a.m : c.m_grid.front();
  s.N = a.N > 0 ? a.N : c.N_grid.front();
  s.lr = a.lr;
  s.wd = a.wd;
  s.seed = c.seeds.front();
  s.run_id = make_run_id(s);
  c.archs = {s.arch};
  c.m_grid = {s.m};
  c.N_grid = {s.N};
  c.sgd.lr = {s.lr};
  c.sgd.lr_by_arch.clear();
  c.sgd.wd = {s.wd};
  c.seeds = {s.seed};
  if (s.variant != "experiment") c.regularizers = {s.variant};
  validate(c);
  const auto r = execute_run(c, s);
  fs::create_directories(c.out);
  const auto path = fs::path(c.out) / ("train_" + s.run_id + ".csv");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  write_train_log_csv(f, run_meta(s, config_hash(c)), r.log);
  std::cout << s.run_id << "  " << to_string(r.log.status) << "  train=" << format_real(r.train_loss)
            << "  test=" << format_real(r.test_loss) << "  gap=" << format_real(r.gen_gap) << '\n'
            << "wrote " << path.string() << '\n';
  return r.log.ok() ? 0 : 1;
}

int cmd_verify(const Common& g, const std::string& suite) {
  auto c = effective_config(g, false);
  auto o = suite_options(c);
  if (g.seed) o.seed = *g.seed;
  std::vector<std::string> names;
  if (suite == "all") {
    for (const auto& [n, fn] : suites()) names.push_back(n);
  } else {
    if (!suites().count(suite)) throw ConfigError("unknown suite: " + suite);
    names = {suite};
  }
  return run_suites(names, o, c.out);
}

int cmd_plot(const Common& g, const std::string& summary) {
  const std::string out = resolve_out(g, "");
  const fs::path csv = summary.empty() ? fs::path(out) / "summary.csv" : fs::path(summary);
  const auto paths = emit_plots_from_csv(csv, out);
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overparam_lab: over-parameterized network experiments and verification suites"};
  app.require_subcommand(1);
  Common g;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", g.config, "YAML config file");
    sub->add_option("--seed", seed, "single seed (replaces the config's seed list)");
    sub->add_option("--out", g.out, "output directory (default: config 'out', then $OVERPARAM_LAB_OUT, then ./out)");
  };

  auto* sweep = app.add_subcommand("sweep", "run the config's task and write CSV/SVG/JSON artifacts");
  add_common(sweep);
  sweep->add_option("--jobs", g.jobs, "concurrent runs")->check(CLI::Range(1, 256));
  sweep->add_flag("--paper-scale", g.full_scale, "800 epochs, lr drop at 400, full lr and wd grids");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train one configuration and write its log");
  add_common(train);
  train->add_flag("--paper-scale", g.full_scale, "800 epochs, lr drop at 400");
  train->add_option("--arch", ta.arch, "2layer, 2layer-last, 2layer-ntk, 3layer, 3layer-last, 3layer-ntk");
  train->add_option("--variant", ta.variant, "experiment, frobenius or row-l4");
  train->add_option("--m", ta.m, "width (default: first grid value)");
  train->add_option("--N", ta.N, "training samples (default: first grid value)");
  train->add_option("--lr", ta.lr, "learning rate");
  train->add_option("--wd", ta.wd, "weight decay");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a property suite; exit 1 if any check fails");
  add_common(verify);
  verify->add_option("suite", suite, "hermite, interval, fit, wstar, coupling, gradients, pseudo, bookkeeping, ntk, "
                                     "norm-ratio or all")
      ->required();

  std::string summary;
  auto* plot = app.add_subcommand("plot", "render SVGs from a summary CSV");
  plot->add_option("--summary", summary, "summary.csv (default: <out>/summary.csv)");
  plot->add_option("--out", g.out, "output directory");

  CLI11_PARSE(app, argc, argv);
  for (auto* sub : {sweep, train, verify})
    if (sub->parsed() && sub->count("--seed")) g.seed = seed;

  try {
    if (sweep->parsed()) return cmd_sweep(g);
    if (train->parsed()) return cmd_train(g, ta);
    if (verify->parsed()) return cmd_verify(g, suite);
    if (plot->parsed()) return cmd_plot(g, summary);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
