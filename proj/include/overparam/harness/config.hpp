#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"

namespace overparam::harness {

enum class Task { Fig1aSweepM, Fig1bSweepN, Fig6Tanh, Fig7Regularizer, CouplingSuite, ConstructSuite };
enum class Arch { TwoLayer, TwoLayerLast, TwoLayerNtk, ThreeLayer, ThreeLayerLast, ThreeLayerNtk };

inline const char* to_string(Task t) {
  switch (t) {
    case Task::Fig1aSweepM: return "fig1a-sweep-m";
    case Task::Fig1bSweepN: return "fig1b-sweep-N";
    case Task::Fig6Tanh: return "fig6-tanh";
    case Task::Fig7Regularizer: return "fig7-regularizer";
    case Task::CouplingSuite: return "coupling-suite";
    case Task::ConstructSuite: return "construct-suite";
  }
  return "?";
}

inline Task task_from_string(const std::string& s) {
  for (Task t : {Task::Fig1aSweepM, Task::Fig1bSweepN, Task::Fig6Tanh, Task::Fig7Regularizer, Task::CouplingSuite,
                 Task::ConstructSuite})
    if (s == to_string(t)) return t;
  throw ConfigError("unknown task: " + s);
}

inline const char* to_string(Arch a) {
  switch (a) {
    case Arch::TwoLayer: return "2layer";
    case Arch::TwoLayerLast: return "2layer-last";
    case Arch::TwoLayerNtk: return "2layer-ntk";
    case Arch::ThreeLayer: return "3layer";
    case Arch::ThreeLayerLast: return "3layer-last";
    case Arch::ThreeLayerNtk: return "3layer-ntk";
  }
  return "?";
}

inline const std::vector<Arch>& all_archs() {
  static const std::vector<Arch> v{Arch::TwoLayer,   Arch::TwoLayerLast,   Arch::TwoLayerNtk,
                                   Arch::ThreeLayer, Arch::ThreeLayerLast, Arch::ThreeLayerNtk};
  return v;
}

inline Arch arch_from_string(const std::string& s) {
  for (Arch a : all_archs())
    if (s == to_string(a)) return a;
  throw ConfigError("unknown arch: " + s);
}

inline bool is_ntk(Arch a) { return a == Arch::TwoLayerNtk || a == Arch::ThreeLayerNtk; }

/// {1, 2, 5} * 10^-k for k in [k_lo, k_hi], decreasing.
inline std::vector<double> decade_grid(int k_lo, int k_hi) {
  std::vector<double> v;
  for (int k = k_lo; k <= k_hi; ++k)
    for (double c : {5.0, 2.0, 1.0}) v.push_back(c * std::pow(10.0, -k));
  return v;
}

inline constexpr Index kNtkWidthCap = 4000;

struct SweepSgd {
  int epochs = 200;
  int lr_drop_epoch = -1;  // -1: half of epochs
  double momentum = 0.9;
  Index batch = 50;
  std::vector<double> lr = decade_grid(1, 4);
  std::vector<double> wd{0.0};
  std::map<std::string, std::vector<double>> lr_by_arch;  // overrides lr for one arch
  std::string loss = "squared";
  int eval_every = 0;
};

struct CouplingSuiteConfig {
  std::vector<Index> m1{1000, 4000, 16000};
  Index m2 = 10;
  Index d = 8;
  double tau_w = 0.005;
  double tau_v = 0.0;
  std::string mode = "adversarial";  // or "random"
  double kappa = 0.01;
  int seeds = 20;  // per width, counted up from the run seed
};

struct FitSpec {
  std::string activation = "sin";
  double c = 3.0;
  double eps = 0.05;
  double clamp = 1e4;
};

struct ConstructSuiteConfig {
  std::vector<FitSpec> fits{{"sin", 3.0, 0.05, 1e4}, {"cos", 7.0, 0.05, 1e9}};
  long samples = 1000000;
  Index grid = 21;
  double interval_tau = 0.01;
  Index interval_grid = 41;
  Index wstar_m = 200000;
  Index wstar_test = 2000;
};

struct ExperimentConfig {
  Task task = Task::Fig1aSweepM;
  std::string target = "sin-fig1";
  Index d = 4;
  std::vector<Arch> archs = all_archs();
  std::vector<Index> m_grid;
  std::vector<Index> N_grid;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  SweepSgd sgd;
  std::vector<std::string> regularizers{"frobenius", "row-l4"};
  int test_factor = 10;
  std::string precision = "float";
  CouplingSuiteConfig coupling;
  ConstructSuiteConfig construct;
  std::string out;  // empty: resolved by the caller; not part of the hash
};

/// Task-specific grid defaults, used when the config leaves a grid out.
inline void apply_task_defaults(ExperimentConfig& c) {
  switch (c.task) {
    case Task::Fig1aSweepM:
    case Task::Fig6Tanh:
      if (c.m_grid.empty()) c.m_grid = {100, 200, 500, 1000, 2000};
      if (c.N_grid.empty()) c.N_grid = {1000};
      break;
    case Task::Fig1bSweepN:
      if (c.m_grid.empty()) c.m_grid = {2000};
      if (c.N_grid.empty()) c.N_grid = {250, 500, 1000, 2000, 4000};
      break;
    case Task::Fig7Regularizer:
      if (c.m_grid.empty()) c.m_grid = {100, 200, 500, 1000, 2000};
      if (c.N_grid.empty()) c.N_grid = {1000};
      break;
    default:
      break;
  }
}

/// 800 epochs, lr drop at 400, full lr and wd grids.
inline void apply_full_scale(ExperimentConfig& c) {
  c.sgd.epochs = 800;
  c.sgd.lr_drop_epoch = 400;
  c.sgd.lr = decade_grid(0, 4);
  c.sgd.wd = decade_grid(2, 5);
  c.sgd.wd.push_back(0.0);
  c.sgd.lr_by_arch.clear();
}

inline bool is_sweep_task(Task t) {
  return t == Task::Fig1aSweepM || t == Task::Fig1bSweepN || t == Task::Fig6Tanh || t == Task::Fig7Regularizer;
}

inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (c.seeds.empty()) fail("seeds: need at least one seed");
  if (is_sweep_task(c.task)) {
    if (c.m_grid.empty() || c.N_grid.empty()) fail("grid: m and N must be nonempty");
    for (Index m : c.m_grid)
      if (m < 1) fail("grid.m: widths must be positive");
    for (Index n : c.N_grid)
      if (n < 1) fail("grid.N: sample sizes must be positive");
    if (c.archs.empty()) fail("archs: empty");
    if (c.sgd.epochs < 1 || c.sgd.batch < 1) fail("sgd: epochs and batch must be positive");
    if (c.sgd.lr.empty() || c.sgd.wd.empty()) fail("sgd: lr and wd lists must be nonempty");
    for (double v : c.sgd.lr)
      if (!(v > 0)) fail("sgd.lr: values must be positive");
    for (double v : c.sgd.wd)
      if (!(v >= 0)) fail("sgd.wd: values must be >= 0");
    for (const auto& [k, v] : c.sgd.lr_by_arch) {
      arch_from_string(k);
      if (v.empty()) fail("sgd.lr_by_arch." + k + ": empty");
    }
    const auto& l = c.sgd.loss;
    if (l != "squared" && l != "mse" && l != "huber" && l != "l2-regression" && l != "logistic")
      fail("sgd.loss: squared, huber or logistic, got " + l);
    if (c.precision != "float" && c.precision != "double") fail("precision: float or double");
    if (c.test_factor < 1) fail("test_factor: must be >= 1");
    if (c.target != "sin-fig1" && c.target != "tanh-fig6") fail("target: sin-fig1 or tanh-fig6");
    if (c.d != 4) fail("d: the experiment targets are defined on R^4");
    if (c.task == Task::Fig7Regularizer) {
      for (Arch a : c.archs)
        if (a != Arch::ThreeLayer && a != Arch::TwoLayer) fail("fig7-regularizer: archs must be 2layer or 3layer");
      if (c.regularizers.empty()) fail("regularizers: empty");
      for (const auto& r : c.regularizers)
        if (r != "frobenius" && r != "row-l4") fail("regularizers: frobenius or row-l4, got " + r);
    }
  }
  if (c.task == Task::CouplingSuite) {
    if (c.coupling.m1.empty()) fail("coupling.m1: empty");
    if (c.coupling.mode != "adversarial" && c.coupling.mode != "random") fail("coupling.mode: adversarial or random");
    if (!(c.coupling.tau_w >= 0) || !(c.coupling.tau_v >= 0)) fail("coupling: tau must be >= 0");
    if (c.coupling.seeds < 1) fail("coupling.seeds: need at least one");
  }
  if (c.task == Task::ConstructSuite) {
    if (c.construct.fits.empty()) fail("construct.fits: empty");
    if (c.construct.samples < 1 || c.construct.grid < 2) fail("construct: samples >= 1, grid >= 2");
  }
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json archs = json::array();
  for (Arch a : c.archs) archs.push_back(to_string(a));
  json fits = json::array();
  for (const auto& f : c.construct.fits)
    fits.push_back({{"activation", f.activation}, {"c", f.c}, {"eps", f.eps}, {"clamp", f.clamp}});
  return json{{"task", to_string(c.task)},
              {"target", c.target},
              {"d", c.d},
              {"archs", archs},
              {"grid", {{"m", c.m_grid}, {"N", c.N_grid}}},
              {"seeds", c.seeds},
              {"sgd",
               {{"epochs", c.sgd.epochs},
                {"lr_drop_epoch", c.sgd.lr_drop_epoch},
                {"momentum", c.sgd.momentum},
                {"batch", c.sgd.batch},
                {"lr", c.sgd.lr},
                {"wd", c.sgd.wd},
                {"lr_by_arch", c.sgd.lr_by_arch},
                {"loss", c.sgd.loss},
                {"eval_every", c.sgd.eval_every}}},
              {"regularizers", c.regularizers},
              {"test_factor", c.test_factor},
              {"precision", c.precision},
              {"coupling",
               {{"m1", c.coupling.m1},
                {"m2", c.coupling.m2},
                {"d", c.coupling.d},
                {"tau_w", c.coupling.tau_w},
                {"tau_v", c.coupling.tau_v},
                {"mode", c.coupling.mode},
                {"kappa", c.coupling.kappa},
                {"seeds", c.coupling.seeds}}},
              {"construct",
               {{"fits", fits},
                {"samples", c.construct.samples},
                {"grid", c.construct.grid},
                {"interval_tau", c.construct.interval_tau},
                {"interval_grid", c.construct.interval_grid},
                {"wstar_m", c.construct.wstar_m},
                {"wstar_test", c.construct.wstar_test}}}};
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// 16 hex digits of FNV-1a over the canonical JSON of the effective config.
inline std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
  return buf;
}

}  // namespace overparam::harness
