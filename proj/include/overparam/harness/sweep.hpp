#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "overparam/core/stats.hpp"
#include "overparam/diag/norm_ratio.hpp"
#include "overparam/harness/config.hpp"
#include "overparam/targets/concept.hpp"
#include "overparam/targets/dataset.hpp"
#include "overparam/train/models.hpp"
#include "overparam/train/sgd.hpp"

namespace overparam::harness {

struct RunSpec {
  Arch arch = Arch::ThreeLayer;
  std::string variant = "experiment";  // fig7: frobenius | row-l4
  Index m = 0;
  Index N = 0;
  double lr = 0;
  double wd = 0;
  std::uint64_t seed = 0;
  std::string run_id;
};

struct RunResult {
  RunSpec spec;
  TrainLog log;
  double train_loss = kNaN;
  double test_loss = kNaN;
  double gen_gap = kNaN;
  double ratio_w = kNaN;       // norm_ratio of the full first layer
  double ratio_wdelta = kNaN;  // norm_ratio of the trained increment
};

struct SummaryRecord {
  std::string task;
  std::string arch;
  std::string variant;
  Index m = 0;
  Index N = 0;
  std::string status = "ok";  // ok | diverged | skipped
  double lr = kNaN;
  double wd = kNaN;
  double median_test_loss = kNaN;
  double best_test_loss = kNaN;
  double median_train_loss = kNaN;
  double median_gen_gap = kNaN;
  double median_ratio_w = kNaN;
  double median_ratio_wdelta = kNaN;
  int seeds_ok = 0;
  int runs_diverged = 0;
  std::string seeds;
  std::string config_hash;
  std::string version = kVersion;
};

struct SweepSummary {
  std::string task;
  std::string config_hash;
  std::vector<SummaryRecord> records;
  std::vector<RunResult> runs;
};

inline std::string format_real(double v) {
  std::ostringstream os;
  overparam::detail::put_real(os, v);
  return os.str();
}

inline std::string make_run_id(const RunSpec& s) {
  std::ostringstream os;
  os << to_string(s.arch) << '_' << s.variant << "_m" << s.m << "_N" << s.N << "_lr" << format_real(s.lr) << "_wd"
     << format_real(s.wd) << "_s" << s.seed;
  return os.str();
}

inline const std::vector<double>& lr_list(const ExperimentConfig& c, Arch a) {
  const auto it = c.sgd.lr_by_arch.find(to_string(a));
  return it != c.sgd.lr_by_arch.end() ? it->second : c.sgd.lr;
}

inline std::vector<std::string> variants(const ExperimentConfig& c) {
  if (c.task == Task::Fig7Regularizer) return c.regularizers;
  return {"experiment"};
}

/// Every (variant, arch, m, N, lr, wd, seed) in a fixed order. NTK cells wider than the cap are left out.
inline std::vector<RunSpec> plan_runs(const ExperimentConfig& c) {
  std::vector<RunSpec> out;
  for (const auto& var : variants(c))
    for (Arch a : c.archs)
      for (Index m : c.m_grid) {
        if (is_ntk(a) && m > kNtkWidthCap) continue;
        for (Index N : c.N_grid)
          for (double lr : lr_list(c, a))
            for (double wd : c.sgd.wd)
              for (std::uint64_t seed : c.seeds) {
                RunSpec s{a, var, m, N, lr, wd, seed, {}};
                s.run_id = make_run_id(s);
                out.push_back(s);
              }
      }
  return out;
}

inline ExperimentSgdConfig sgd_config(const ExperimentConfig& c, const RunSpec& s) {
  ExperimentSgdConfig g;
  g.lr = s.lr;
  g.wd = s.wd;
  g.momentum = c.sgd.momentum;
  g.batch = c.sgd.batch;
  g.epochs = c.sgd.epochs;
  g.lr_drop_epoch = c.sgd.lr_drop_epoch;
  g.eval_every = c.sgd.eval_every;
  g.loss = loss_from_string(c.sgd.loss);
  g.penalty = s.variant == "row-l4" ? FirstLayerPenalty::RowL4 : FirstLayerPenalty::None;
  return g;
}

namespace detail {

template <class Derived>
double ratio_or_nan(const Eigen::MatrixBase<Derived>& W) {
  return W.cwiseAbs().maxCoeff() > 0 ? norm_ratio(W) : kNaN;
}

template <class S>
RunResult execute_run_as(const ExperimentConfig& c, const RunSpec& s) {
  RngStream root(s.seed);
  const auto target = builtin_experiment_target(c.target);
  const auto N = static_cast<std::uint64_t>(s.N), m = static_cast<std::uint64_t>(s.m);
  RngStream tr_rng = root.split(1).split(N), te_rng = root.split(2).split(N);
  RngStream init_rng = root.split(3).split(m), sgd_rng = root.split(4);
  const TrainData<S> train(generate_dataset(c.d, s.N, target, PaddingMode::Raw, tr_rng));
  const TrainData<S> test(generate_dataset(c.d, s.N * c.test_factor, target, PaddingMode::Raw, te_rng));
  const auto cfg = sgd_config(c, s);

  RunResult r;
  r.spec = s;
  switch (s.arch) {
    case Arch::TwoLayer: {
      auto net = init_two_layer<S>(s.m, c.d, 1, 1.0, InitProfile::Experiment, init_rng);
      TwoLayerModel<S> model(net);
      r.log = train_minibatch(model, train, &test, cfg, sgd_rng);
      if (r.log.ok()) {
        r.ratio_w = ratio_or_nan(net.weights());
        r.ratio_wdelta = ratio_or_nan(net.w_delta);
      }
      break;
    }
    case Arch::TwoLayerLast: {
      const auto net = init_two_layer<S>(s.m, c.d, 1, 1.0, InitProfile::Experiment, init_rng);
      LastLayerModel<S, TwoLayerNet<S>> model(net);
      r.log = train_minibatch(model, train, &test, cfg, sgd_rng);
      break;
    }
    case Arch::TwoLayerNtk: {
      const auto net = init_two_layer<S>(s.m, c.d, 1, 1.0, InitProfile::Experiment, init_rng);
      TwoLayerNtkModel<S> model(net);
      r.log = train_minibatch(model, train, &test, cfg, sgd_rng);
      break;
    }
    case Arch::ThreeLayer: {
      auto net = init_three_layer<S>(s.m, s.m, c.d, 1, InitProfile::Experiment, init_rng);
      ThreeLayerModel<S> model(net);
      r.log = train_minibatch(model, train, &test, cfg, sgd_rng);
      if (r.log.ok()) {
        r.ratio_w = ratio_or_nan(net.weights_w());
        r.ratio_wdelta = ratio_or_nan(net.w_delta);
      }
      break;
    }
    case Arch::ThreeLayerLast: {
      const auto net = init_three_layer<S>(s.m, s.m, c.d, 1, InitProfile::Experiment, init_rng);
      LastLayerModel<S, ThreeLayerNet<S>> model(net);
      r.log = train_minibatch(model, train, &test, cfg, sgd_rng);
      break;
    }
    case Arch::ThreeLayerNtk: {
      const auto net = init_three_layer<S>(s.m, s.m, c.d, 1, InitProfile::Experiment, init_rng);
      ThreeLayerNtkModel<S> model(net);
      r.log = train_minibatch(model, train, &test, cfg, sgd_rng);
      break;
    }
  }
  if (r.log.ok() && !r.log.records.empty()) {
    const auto& last = r.log.final_record();
    r.train_loss = last.train_loss;
    r.test_loss = last.test_loss;
    if (std::isfinite(r.test_loss)) {
      r.gen_gap = generalization_gap(r.log);
    } else {
      r.log.status = RunStatus::Diverged;
      r.log.message = "non-finite test loss";
    }
  }
  return r;
}

}  // namespace detail

/// One training run. Data, init and shuffling streams are split off the run seed, so every arch and
/// (lr, wd) pair sees the same data for a given (seed, N), and the same init for a given (seed, m).
inline RunResult execute_run(const ExperimentConfig& c, const RunSpec& s) {
  return c.precision == "double" ? detail::execute_run_as<double>(c, s) : detail::execute_run_as<float>(c, s);
}

inline RunMeta run_meta(const RunSpec& s, const std::string& hash) {
  RunMeta meta;
  meta.run_id = s.run_id;
  meta.seed = s.seed;
  meta.arch = to_string(s.arch);
  meta.variant = s.variant;
  meta.m1 = static_cast<long>(s.m);
  meta.m2 = s.arch == Arch::ThreeLayer || s.arch == Arch::ThreeLayerLast || s.arch == Arch::ThreeLayerNtk
                ? static_cast<long>(s.m)
                : 0;
  meta.N = static_cast<long>(s.N);
  meta.wd = s.wd;
  meta.config_hash = hash;
  return meta;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions are rethrown after all
/// workers stop, lowest index first.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1 || n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

using ProgressFn = std::function<void(const RunResult&, std::size_t done, std::size_t total)>;

inline std::string join_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? ";" : "") + std::to_string(seeds[i]);
  return s;
}

/// Best (lr, wd) per (variant, arch, m, N): the lowest median final test loss over seeds. Diverged
/// runs are excluded; pairs with every seed finite are preferred over partially diverged ones.
inline std::vector<SummaryRecord> summarize(const ExperimentConfig& c, const std::vector<RunResult>& runs,
                                            const std::string& hash) {
  std::vector<SummaryRecord> out;
  const auto seeds = join_seeds(c.seeds);
  for (const auto& var : variants(c))
    for (Arch a : c.archs)
      for (Index m : c.m_grid)
        for (Index N : c.N_grid) {
          SummaryRecord rec;
          rec.task = to_string(c.task);
          rec.arch = to_string(a);
          rec.variant = var;
          rec.m = m;
          rec.N = N;
          rec.seeds = seeds;
          rec.config_hash = hash;
          if (is_ntk(a) && m > kNtkWidthCap) {
            rec.status = "skipped";
            out.push_back(rec);
            continue;
          }
          struct Pair {
            double lr, wd;
            std::vector<const RunResult*> ok;
            int diverged = 0;
          };
          std::vector<Pair> pairs;
          for (double lr : lr_list(c, a))
            for (double wd : c.sgd.wd) pairs.push_back({lr, wd, {}, 0});
          for (const auto& r : runs) {
            const auto& s = r.spec;
            if (s.arch != a || s.variant != var || s.m != m || s.N != N) continue;
            for (auto& p : pairs)
              if (p.lr == s.lr && p.wd == s.wd) {
                if (r.log.ok()) {
                  p.ok.push_back(&r);
                } else {
                  ++p.diverged;
                }
              }
          }
          auto med = [](const std::vector<const RunResult*>& v, double RunResult::*f) {
            std::vector<double> x;
            for (const auto* r : v)
              if (std::isfinite(r->*f)) x.push_back(r->*f);
            return x.empty() ? kNaN : median(x);
          };
          const Pair* best = nullptr;
          double best_med = kInf;
          for (bool require_all : {true, false}) {
            for (const auto& p : pairs) {
              if (p.ok.empty() || (require_all && p.diverged > 0)) continue;
              const double v = med(p.ok, &RunResult::test_loss);
              if (v < best_med) {
                best_med = v;
                best = &p;
              }
            }
            if (best) break;
          }
          for (const auto& p : pairs) rec.runs_diverged += p.diverged;
          if (!best) {
            rec.status = "diverged";
            out.push_back(rec);
            continue;
          }
          rec.lr = best->lr;
          rec.wd = best->wd;
          rec.seeds_ok = static_cast<int>(best->ok.size());
          rec.median_test_loss = best_med;
          rec.best_test_loss = kInf;
          for (const auto* r : best->ok) rec.best_test_loss = std::min(rec.best_test_loss, r->test_loss);
          rec.median_train_loss = med(best->ok, &RunResult::train_loss);
          rec.median_gen_gap = med(best->ok, &RunResult::gen_gap);
          rec.median_ratio_w = med(best->ok, &RunResult::ratio_w);
          rec.median_ratio_wdelta = med(best->ok, &RunResult::ratio_wdelta);
          out.push_back(rec);
        }
  return out;
}

inline constexpr const char* kRunsHeader =
    "run_id,seed,arch,variant,m,N,lr,wd,status,final_train_loss,final_test_loss,gen_gap,ratio_w,ratio_wdelta,"
    "config_hash,version";

inline void write_run_row(std::ostream& os, const RunResult& r, const std::string& hash) {
  const auto& s = r.spec;
  os << s.run_id << ',' << s.seed << ',' << to_string(s.arch) << ',' << s.variant << ',' << s.m << ',' << s.N << ','
     << format_real(s.lr) << ',' << format_real(s.wd) << ',' << to_string(r.log.status) << ','
     << format_real(r.train_loss) << ',' << format_real(r.test_loss) << ',' << format_real(r.gen_gap) << ','
     << format_real(r.ratio_w) << ',' << format_real(r.ratio_wdelta) << ',' << hash << ',' << kVersion << '\n';
}

inline constexpr const char* kSummaryHeader =
    "task,arch,variant,m,N,status,lr,wd,median_test_loss,best_test_loss,median_train_loss,median_gen_gap,"
    "median_ratio_w,median_ratio_wdelta,seeds_ok,runs_diverged,seeds,config_hash,version";

inline void write_summary_row(std::ostream& os, const SummaryRecord& r) {
  os << r.task << ',' << r.arch << ',' << r.variant << ',' << r.m << ',' << r.N << ',' << r.status << ','
     << format_real(r.lr) << ',' << format_real(r.wd) << ',' << format_real(r.median_test_loss) << ','
     << format_real(r.best_test_loss) << ',' << format_real(r.median_train_loss) << ','
     << format_real(r.median_gen_gap) << ',' << format_real(r.median_ratio_w) << ','
     << format_real(r.median_ratio_wdelta) << ',' << r.seeds_ok << ',' << r.runs_diverged << ',' << r.seeds << ','
     << r.config_hash << ',' << r.version << '\n';
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRecord>& recs) {
  os << kSummaryHeader << '\n';
  for (const auto& r : recs) write_summary_row(os, r);
}

namespace detail {
inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}
}  // namespace detail

/// Trains every planned run and writes, under c.out:
///   runs/<run_id>.csv  per-run train log (written by the worker that owns the run)
///   train_log.csv      all per-run logs merged in plan order
///   runs.csv           one row per run
///   summary.csv        one row per (variant, arch, m, N) with the chosen (lr, wd)
///   config.json        effective config and its hash
inline SweepSummary run_sweep(const ExperimentConfig& c, int jobs = 1, const ProgressFn& progress = {}) {
  validate(c);
  if (!is_sweep_task(c.task)) throw ConfigError(std::string("run_sweep: not a sweep task: ") + to_string(c.task));
  namespace fs = std::filesystem;
  const fs::path out(c.out.empty() ? "out" : c.out);
  fs::create_directories(out / "runs");
  const std::string hash = config_hash(c);
  {
    auto f = detail::open_out(out / "config.json");
    nlohmann::json j = to_json(c);
    j["config_hash"] = hash;
    j["version"] = kVersion;
    f << j.dump(2) << '\n';
  }

  const auto plan = plan_runs(c);
  SweepSummary summary;
  summary.task = to_string(c.task);
  summary.config_hash = hash;
  summary.runs.resize(plan.size());
  std::mutex mu;
  std::size_t done = 0;
  parallel_for(plan.size(), jobs, [&](std::size_t i) {
    RunResult r = execute_run(c, plan[i]);
    {
      auto f = detail::open_out(out / "runs" / (plan[i].run_id + ".csv"));
      write_train_log_csv(f, run_meta(plan[i], hash), r.log);
    }
    summary.runs[i] = std::move(r);
    std::lock_guard<std::mutex> lock(mu);
    ++done;
    if (progress) progress(summary.runs[i], done, plan.size());
  });

  {
    auto log = detail::open_out(out / "train_log.csv");
    auto runs = detail::open_out(out / "runs.csv");
    log << kTrainLogHeader << '\n';
    runs << kRunsHeader << '\n';
    for (const auto& r : summary.runs) {
      write_train_log_rows(log, run_meta(r.spec, hash), r.log);
      write_run_row(runs, r, hash);
    }
  }
  summary.records = summarize(c, summary.runs, hash);
  auto f = detail::open_out(out / "summary.csv");
  write_summary_csv(f, summary.records);
  return summary;
}

// ---------------------------------------------------------------------------
// Reading a summary back (plots are a function of the CSV alone).

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_real(const std::string& s) { return s.empty() ? kNaN : std::stod(s); }

inline std::vector<SummaryRecord> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) throw InvalidInput("summary csv: missing or wrong header");
  std::vector<SummaryRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 19) throw InvalidInput("summary csv: expected 19 columns, got " + std::to_string(c.size()));
    SummaryRecord r;
    r.task = c[0];
    r.arch = c[1];
    r.variant = c[2];
    r.m = std::stol(c[3]);
    r.N = std::stol(c[4]);
    r.status = c[5];
    r.lr = parse_real(c[6]);
    r.wd = parse_real(c[7]);
    r.median_test_loss = parse_real(c[8]);
    r.best_test_loss = parse_real(c[9]);
    r.median_train_loss = parse_real(c[10]);
    r.median_gen_gap = parse_real(c[11]);
    r.median_ratio_w = parse_real(c[12]);
    r.median_ratio_wdelta = parse_real(c[13]);
    r.seeds_ok = std::stoi(c[14]);
    r.runs_diverged = std::stoi(c[15]);
    r.seeds = c[16];
    r.config_hash = c[17];
    r.version = c[18];
    out.push_back(r);
  }
  return out;
}

}  // namespace overparam::harness
