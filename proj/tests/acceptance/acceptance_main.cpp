// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   acceptance [--out dir] [criterion numbers...]
//
// With no numbers every criterion runs. Sweep artifacts, suite reports and a copy of the
// printed lines (acceptance.txt) go under --out (default ./acceptance_out).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "overparam/harness/plots.hpp"
#include "overparam/harness/sweep.hpp"
#include "overparam/harness/verify.hpp"

using namespace overparam;
using namespace overparam::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const SummaryRecord* find(const std::vector<SummaryRecord>& recs, const std::string& arch, Index m, Index N,
                          const std::string& variant = "experiment") {
  for (const auto& r : recs)
    if (r.arch == arch && r.m == m && r.N == N && r.variant == variant) return &r;
  return nullptr;
}

double loss(const std::vector<SummaryRecord>& recs, const std::string& arch, Index m, Index N) {
  const auto* r = find(recs, arch, m, N);
  return r && r->status == "ok" ? r->median_test_loss : kNaN;
}

// NaN compares false, so a missing or diverged cell fails the ordering.
bool less(double a, double b) { return a < b; }

// Desk-scale sweep over m in {100, 2000}; shared by criteria 1 and 2.
class Fig1aSweep {
 public:
  explicit Fig1aSweep(fs::path out) : out_(std::move(out)) {}

  const std::vector<SummaryRecord>& records() {
    if (!done_) {
      ExperimentConfig c;
      c.task = Task::Fig1aSweepM;
      c.m_grid = {100, 2000};
      c.N_grid = {1000};
      c.seeds = {0, 1, 2};
      c.sgd.epochs = 50;
      c.sgd.wd = {0.0};
      c.sgd.lr = {1e-3, 2e-3};
      c.sgd.lr_by_arch = {{"2layer", {1e-3, 2e-3, 5e-3}},
                          {"2layer-ntk", {1e-3, 2e-3, 5e-3}},
                          {"2layer-last", {1.0, 2.0}},
                          {"3layer-last", {1.0, 2.0}}};
      c.out = out_.string();
      recs_ = run_sweep(c, jobs()).records;
      done_ = true;
    }
    return recs_;
  }

 private:
  fs::path out_;
  bool done_ = false;
  std::vector<SummaryRecord> recs_;
};

Outcome criterion1(Fig1aSweep& sweep) {
  const auto& recs = sweep.records();
  const Index m = 2000, N = 1000;
  const double l3 = loss(recs, "3layer", m, N), l2 = loss(recs, "2layer", m, N);
  const double l3last = loss(recs, "3layer-last", m, N), l2last = loss(recs, "2layer-last", m, N);
  const double l3ntk = loss(recs, "3layer-ntk", m, N), l2ntk = loss(recs, "2layer-ntk", m, N);
  const bool ok = less(l3, l2) && less(l3, l3last) && less(l2, l2last) && less(l2, l3last) && less(l3ntk, l3last);
  return {ok, "3layer=" + num(l3) + " 2layer=" + num(l2) + " 3layer-last=" + num(l3last) +
                  " 2layer-last=" + num(l2last) + " 3layer-ntk=" + num(l3ntk) + " 2layer-ntk=" + num(l2ntk)};
}

Outcome criterion2(Fig1aSweep& sweep) {
  const auto& recs = sweep.records();
  const double a100 = loss(recs, "2layer", 100, 1000), a2000 = loss(recs, "2layer", 2000, 1000);
  const double b100 = loss(recs, "3layer", 100, 1000), b2000 = loss(recs, "3layer", 2000, 1000);
  return {less(a2000, a100) && less(b2000, b100), "2layer m=100: " + num(a100) + " m=2000: " + num(a2000) +
                                                      "; 3layer m=100: " + num(b100) + " m=2000: " + num(b2000)};
}

Outcome criterion3(const fs::path& out) {
  ExperimentConfig c;
  c.task = Task::Fig1bSweepN;
  c.archs = {Arch::ThreeLayer};
  c.m_grid = {2000};
  c.N_grid = {250, 4000};
  c.seeds = {0, 1, 2};
  c.sgd.epochs = 30;
  c.sgd.lr = {1e-3};
  c.sgd.wd = {0.0};
  c.out = out.string();
  const auto recs = run_sweep(c, jobs()).records;
  const double lo = loss(recs, "3layer", 2000, 250), hi = loss(recs, "3layer", 2000, 4000);
  return {less(hi, lo), "3layer N=250: " + num(lo) + " N=4000: " + num(hi)};
}

Outcome from_suite(const std::string& name, const SuiteOptions& o, const fs::path& out) {
  const auto r = run_verification(name, o, out);
  std::string detail;
  for (const auto& c : r.report["checks"]) {
    if (!detail.empty()) detail += "; ";
    detail += c["name"].get<std::string>();
    if (c.contains("value")) detail += " " + num(c["value"].get<double>());
  }
  return {r.passed, detail};
}

Outcome criterion11(const SuiteOptions& o, const fs::path& out) {
  auto base = from_suite("norm-ratio", o, out);
  ExperimentConfig c;
  c.task = Task::Fig7Regularizer;
  c.archs = {Arch::ThreeLayer};
  c.m_grid = {50, 100, 200};
  c.N_grid = {200};
  c.seeds = {0};
  c.sgd.epochs = 30;
  c.sgd.lr = {2e-3};
  c.sgd.wd = {1e-2};
  c.out = (out / "fig7").string();
  const auto recs = run_sweep(c, jobs()).records;
  const auto svgs = emit_plots(recs, c.out);
  bool curves = true;
  std::string ratios;
  for (const char* reg : {"frobenius", "row-l4"})
    for (Index m : c.m_grid) {
      const auto* r = find(recs, "3layer", m, 200, reg);
      const double v = r ? r->median_ratio_w : kNaN;
      curves = curves && r && r->status == "ok" && v >= 1.0 && v <= static_cast<double>(m);
      ratios += std::string(" ") + reg + "@" + std::to_string(m) + "=" + num(v);
    }
  const auto svg = c.out + "/fig7-regularizer_ratio_vs_m.svg";
  std::ifstream f(svg);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  std::size_t lines = 0;
  for (auto p = text.find("<polyline"); p != std::string::npos; p = text.find("<polyline", p + 1)) ++lines;
  const bool plotted = svgs.size() == 2 && lines == 2;
  return {base.passed && curves && plotted, base.detail + "; ratio curves:" + ratios + "; svg polylines " +
                                                std::to_string(lines)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = "acceptance_out";
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) {
      out = argv[++i];
    } else {
      try {
        only.insert(std::stoi(a));
      } catch (const std::exception&) {
        std::cerr << "usage: acceptance [--out dir] [criterion numbers...]\n";
        return 2;
      }
    }
  }
  fs::create_directories(out);

  SuiteOptions o;  // full sizes: 100 configs, 50 directions, 1000 matrices, 20 coupling seeds
  Fig1aSweep fig1a(out / "fig1a");
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"fig1a ordering at m=2000", [&] { return criterion1(fig1a); }}},
      {2, {"fig1a trend in m", [&] { return criterion2(fig1a); }}},
      {3, {"fig1b trend in N", [&] { return criterion3(out / "fig1b"); }}},
      {4, {"fit identity for sin(3z), cos(7z)", [&] { return from_suite("fit", o, out); }}},
      {5, {"interval partition properties", [&] { return from_suite("interval", o, out); }}},
      {6, {"flip-count slope", [&] { return from_suite("coupling", o, out); }}},
      {7, {"gradients vs central differences", [&] { return from_suite("gradients", o, out); }}},
      {8, {"pseudo-network exactness", [&] { return from_suite("pseudo", o, out); }}},
      {9, {"training bookkeeping", [&] { return from_suite("bookkeeping", o, out); }}},
      {10, {"NTK first-order check", [&] { return from_suite("ntk", o, out); }}},
      {11, {"norm ratio properties and fig7 curves", [&] { return criterion11(o, out); }}},
      {12, {"two-layer construction MAE", [&] { return from_suite("wstar", o, out); }}},
  };

  std::ofstream report(out / "acceptance.txt");
  int failed = 0;
  for (const auto& [id, entry] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = entry.second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r.passed) ++failed;
    std::ostringstream line;
    line << "criterion " << id << ": " << (r.passed ? "PASS" : "FAIL") << "  " << entry.first << "  ["
         << num(secs) << " s]  " << r.detail << '\n';
    std::cout << line.str() << std::flush;
    report << line.str() << std::flush;
  }
  const std::string verdict = failed ? std::to_string(failed) + " criteria failed" : "all criteria passed";
  std::cout << verdict << '\n';
  report << verdict << '\n';
  return failed ? 1 : 0;
}
