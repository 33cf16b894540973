#pragma once

// Requires linking yaml-cpp.

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <yaml-cpp/yaml.h>

#include "overparam/harness/config.hpp"

namespace overparam::harness {

namespace detail {

inline void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& where) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": bad value");
  }
}

template <class T>
std::vector<T> list(const YAML::Node& n, const std::string& where) {
  if (n.IsScalar()) return {scalar<T>(n, where)};
  if (!n.IsSequence()) throw ConfigError(where + ": expected a list");
  std::vector<T> v;
  for (std::size_t i = 0; i < n.size(); ++i) v.push_back(scalar<T>(n[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

template <class T>
void maybe(const YAML::Node& parent, const char* key, T& out, const std::string& where) {
  if (const auto n = parent[key]) out = scalar<T>(n, where + key);
}

template <class T>
void maybe_list(const YAML::Node& parent, const char* key, std::vector<T>& out, const std::string& where) {
  if (const auto n = parent[key]) out = list<T>(n, where + key);
}

// lr / wd accept a list of numbers or the shorthand {decades: [k_lo, k_hi]} for {1,2,5}*10^-k.
inline std::vector<double> rate_list(const YAML::Node& n, const std::string& where) {
  if (n.IsMap()) {
    check_keys(n, where, {"decades", "with_zero"});
    const auto k = list<int>(n["decades"], where + ".decades");
    if (k.size() != 2 || k[0] > k[1]) throw ConfigError(where + ".decades: expected [k_lo, k_hi]");
    auto v = decade_grid(k[0], k[1]);
    if (n["with_zero"] && scalar<bool>(n["with_zero"], where + ".with_zero")) v.push_back(0.0);
    return v;
  }
  return list<double>(n, where);
}

}  // namespace detail

inline ExperimentConfig parse_config(const YAML::Node& root) {
  using namespace detail;
  if (!root || root.IsNull()) throw ConfigError("config: empty document");
  check_keys(root, "", {"task", "target", "d", "archs", "grid", "seeds", "sgd", "regularizers", "test_factor",
                        "precision", "coupling", "construct", "out"});
  if (!root["task"]) throw ConfigError("config: 'task' is required");
  ExperimentConfig c;
  c.task = task_from_string(scalar<std::string>(root["task"], "task"));
  if (c.task == Task::Fig6Tanh) c.target = "tanh-fig6";
  if (c.task == Task::Fig7Regularizer) c.archs = {Arch::ThreeLayer};
  maybe(root, "target", c.target, "");
  maybe(root, "d", c.d, "");
  if (const auto a = root["archs"]) {
    c.archs.clear();
    for (const auto& s : list<std::string>(a, "archs")) c.archs.push_back(arch_from_string(s));
  }
  if (const auto g = root["grid"]) {
    check_keys(g, "grid", {"m", "N"});
    maybe_list(g, "m", c.m_grid, "grid.");
    maybe_list(g, "N", c.N_grid, "grid.");
  }
  maybe_list(root, "seeds", c.seeds, "");
  if (const auto s = root["sgd"]) {
    check_keys(s, "sgd", {"epochs", "lr_drop_epoch", "momentum", "batch", "lr", "wd", "lr_by_arch", "loss",
                          "eval_every"});
    maybe(s, "epochs", c.sgd.epochs, "sgd.");
    maybe(s, "lr_drop_epoch", c.sgd.lr_drop_epoch, "sgd.");
    maybe(s, "momentum", c.sgd.momentum, "sgd.");
    maybe(s, "batch", c.sgd.batch, "sgd.");
    maybe(s, "loss", c.sgd.loss, "sgd.");
    maybe(s, "eval_every", c.sgd.eval_every, "sgd.");
    if (s["lr"]) c.sgd.lr = rate_list(s["lr"], "sgd.lr");
    if (s["wd"]) c.sgd.wd = rate_list(s["wd"], "sgd.wd");
    if (const auto by = s["lr_by_arch"]) {
      if (!by.IsMap()) throw ConfigError("sgd.lr_by_arch: expected a mapping");
      for (const auto& kv : by) {
        const auto name = kv.first.as<std::string>();
        arch_from_string(name);
        c.sgd.lr_by_arch[name] = rate_list(kv.second, "sgd.lr_by_arch." + name);
      }
    }
  }
  maybe_list(root, "regularizers", c.regularizers, "");
  maybe(root, "test_factor", c.test_factor, "");
  maybe(root, "precision", c.precision, "");
  maybe(root, "out", c.out, "");
  if (const auto cp = root["coupling"]) {
    check_keys(cp, "coupling", {"m1", "m2", "d", "tau_w", "tau_v", "mode", "kappa", "seeds"});
    maybe_list(cp, "m1", c.coupling.m1, "coupling.");
    maybe(cp, "m2", c.coupling.m2, "coupling.");
    maybe(cp, "d", c.coupling.d, "coupling.");
    maybe(cp, "tau_w", c.coupling.tau_w, "coupling.");
    maybe(cp, "tau_v", c.coupling.tau_v, "coupling.");
    maybe(cp, "mode", c.coupling.mode, "coupling.");
    maybe(cp, "kappa", c.coupling.kappa, "coupling.");
    maybe(cp, "seeds", c.coupling.seeds, "coupling.");
  }
  if (const auto cs = root["construct"]) {
    check_keys(cs, "construct", {"fits", "samples", "grid", "interval_tau", "interval_grid", "wstar_m", "wstar_test"});
    if (const auto fits = cs["fits"]) {
      if (!fits.IsSequence()) throw ConfigError("construct.fits: expected a list");
      c.construct.fits.clear();
      for (std::size_t i = 0; i < fits.size(); ++i) {
        const std::string w = "construct.fits[" + std::to_string(i) + "]";
        check_keys(fits[i], w, {"activation", "c", "eps", "clamp"});
        FitSpec f;
        maybe(fits[i], "activation", f.activation, w + ".");
        maybe(fits[i], "c", f.c, w + ".");
        maybe(fits[i], "eps", f.eps, w + ".");
        maybe(fits[i], "clamp", f.clamp, w + ".");
        c.construct.fits.push_back(f);
      }
    }
    maybe(cs, "samples", c.construct.samples, "construct.");
    maybe(cs, "grid", c.construct.grid, "construct.");
    maybe(cs, "interval_tau", c.construct.interval_tau, "construct.");
    maybe(cs, "interval_grid", c.construct.interval_grid, "construct.");
    maybe(cs, "wstar_m", c.construct.wstar_m, "construct.");
    maybe(cs, "wstar_test", c.construct.wstar_test, "construct.");
  }
  apply_task_defaults(c);
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  try {
    return parse_config(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

}  // namespace overparam::harness
