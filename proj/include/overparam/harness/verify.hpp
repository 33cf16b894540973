#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "overparam/construct/fit_function.hpp"
#include "overparam/construct/hermite.hpp"
#include "overparam/construct/interval_partition.hpp"
#include "overparam/construct/two_layer_wstar.hpp"
#include "overparam/core/stats.hpp"
#include "overparam/diag/coupling.hpp"
#include "overparam/diag/norm_ratio.hpp"
#include "overparam/harness/config.hpp"
#include "overparam/nets/features.hpp"
#include "overparam/targets/dataset.hpp"
#include "overparam/train/sgd.hpp"

namespace overparam::harness {

struct SuiteOptions {
  std::uint64_t seed = 0;
  ConstructSuiteConfig construct;
  CouplingSuiteConfig coupling;
  double slope_lo = 1.05, slope_hi = 1.35;
  int configs = 100;        // gradients, pseudo
  int directions = 50;      // ntk
  int random_matrices = 1000;
  std::string coupling_csv;  // optional per-seed rows
};

struct SuiteResult {
  std::string suite;
  bool passed = true;
  nlohmann::json report = nlohmann::json::object();
  std::vector<std::string> failures;

  // Records one assertion; value and bound are kept in the report.
  bool check(const std::string& name, bool ok, double value = kNaN, double bound = kNaN) {
    nlohmann::json c{{"name", name}, {"passed", ok}};
    if (!std::isnan(value)) c["value"] = value;
    if (!std::isnan(bound)) c["bound"] = bound;
    report["checks"].push_back(c);
    if (!ok) {
      passed = false;
      failures.push_back(name);
    }
    return ok;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = report;
    j["suite"] = suite;
    j["passed"] = passed;
    j["failures"] = failures;
    j["version"] = kVersion;
    return j;
  }
};

namespace detail {

inline Vector unit_vector(Index d, RngStream& rng) {
  Vector g = sample_gaussian_vector(d, 1.0, rng);
  return g / g.norm();
}

inline std::string gfmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max(b.norm(), 1e-12);
  return (a - b).norm() / scale;
}

template <class F>
Matrix central_grad(Matrix& w, double h, F&& f) {
  Matrix g(w.rows(), w.cols());
  for (Index i = 0; i < w.rows(); ++i)
    for (Index j = 0; j < w.cols(); ++j) {
      const double keep = w(i, j);
      w(i, j) = keep + h;
      const double up = f();
      w(i, j) = keep - h;
      const double dn = f();
      w(i, j) = keep;
      g(i, j) = (up - dn) / (2 * h);
    }
  return g;
}

}  // namespace detail

/// Gaussian orthogonality of He_0..He_8 by Monte Carlo, and the coefficient table against the recurrence.
inline SuiteResult suite_hermite(const SuiteOptions& o) {
  SuiteResult r{"hermite"};
  const int D = 8;
  const long n = 1000000;
  const HermiteBasis H(D);
  double table_err = 0;
  for (int i = 0; i <= D; ++i)
    for (double x : {-2.5, -0.3, 0.0, 0.7, 3.1}) {
      double v = 0, p = 1;
      for (double c : H.coefficients(i)) {
        v += c * p;
        p *= x;
      }
      table_err = std::max(table_err, std::abs(v - H.eval(i, x)) / std::max(1.0, std::abs(v)));
    }
  r.check("coefficient table matches recurrence", table_err <= 1e-12, table_err, 1e-12);
  RngStream rng = RngStream(o.seed).split(0x4845);
  std::vector<MeanAccumulator> acc((D + 1) * (D + 1));
  std::vector<double> h;
  for (long t = 0; t < n; ++t) {
    H.eval_all(D, rng.normal(), h);
    for (int i = 0; i <= D; ++i)
      for (int j = i; j <= D; ++j) acc[static_cast<std::size_t>(i * (D + 1) + j)].add(h[i] * h[j]);
  }
  double worst = 0;
  for (int i = 0; i <= D; ++i)
    for (int j = i; j <= D; ++j) {
      const auto& a = acc[static_cast<std::size_t>(i * (D + 1) + j)];
      const double expect = i == j ? HermiteBasis::norm_sq(i) : 0.0;
      const double z = std::abs(a.mean - expect) / std::max(a.std_err(), 1e-300);
      worst = std::max(worst, z);
      r.report["pairs"].push_back({{"i", i}, {"j", j}, {"mean", a.mean}, {"expected", expect}, {"std_err", a.std_err()}});
    }
  r.report["samples"] = n;
  r.check("E[He_i He_j] = i! delta_ij within 4 std-err", worst <= 4.0, worst, 4.0);
  return r;
}

inline SuiteResult suite_interval(const SuiteOptions& o) {
  SuiteResult r{"interval"};
  const double tau = o.construct.interval_tau;
  const auto ip = build_interval_partition(tau);
  const auto rep = verify_interval_partition(ip, static_cast<int>(o.construct.interval_grid));
  r.report["partition"] = to_json(rep);
  r.check("balanced", rep.max_balanced_err <= 1e-6, rep.max_balanced_err, 1e-6);
  r.check("symmetric", rep.max_symmetric_err <= 1e-6, rep.max_symmetric_err, 1e-6);
  r.check("unbiased", rep.max_unbiased_err <= 1e-6, rep.max_unbiased_err, 1e-6);
  r.check("bounded span", rep.max_span <= 10 * tau, rep.max_span, 10 * tau);
  r.check("at most two intervals", rep.max_intervals <= 2, rep.max_intervals, 2);
  r.check("inside box", rep.inside_box);
  r.check("finite Lipschitz constant", std::isfinite(rep.lipschitz_K), rep.lipschitz_K);
  r.check("continuous at turning point", rep.turning_gap <= 4 * rep.lipschitz_K * rep.turning_delta + 1e-12,
          rep.turning_gap, 4 * rep.lipschitz_K * rep.turning_delta + 1e-12);
  return r;
}

/// Residual of the fit identity at every grid point against eps + 3 std-err.
inline SuiteResult suite_fit(const SuiteOptions& o) {
  SuiteResult r{"fit"};
  const auto grid = uniform_grid(o.construct.grid);
  for (std::size_t i = 0; i < o.construct.fits.size(); ++i) {
    const auto& f = o.construct.fits[i];
    const auto phi = activations::by_name(f.activation, f.c);
    const std::string tag = f.activation + "(" + detail::gfmt(f.c) + " z)";
    try {
      const auto fit = build_fit_function(phi, f.eps, f.clamp);
      const auto rep = verify_fit_function(fit, phi, grid, static_cast<std::uint64_t>(o.construct.samples),
                                           RngStream(o.seed).split(0x4649 + i));
      r.report["fits"].push_back(to_json(rep));
      r.check(tag + ": residual <= eps + 3 se", rep.identity_holds(), rep.max_excess, f.eps);
      r.check(tag + ": |h| <= C", rep.bounded(), rep.max_abs_h, f.clamp);
    } catch (const ConstructionFailure& e) {
      r.report["fits"].push_back({{"phi", tag}, {"error", e.what()}});
      r.check(tag + ": construction", false);
    }
  }
  return r;
}

/// Two-layer pseudo network with the constructed increments against sin(3 <w1,x>) <w2,x>, d = 8.
inline SuiteResult suite_wstar(const SuiteOptions& o) {
  SuiteResult r{"wstar"};
  const Index d = 8;
  const double eps = 0.05, eps_a = 0.1;
  TwoLayerTarget t;
  t.w1 = Matrix::Zero(1, d);
  t.w2 = Matrix::Zero(1, d);
  t.w1(0, 0) = 1;
  t.w2(0, 1) = 1;
  t.astar = Matrix::Constant(1, 1, 1.0);
  t.phis = {activations::sine(3.0)};
  const auto fit = build_fit_function(t.phis[0], eps, 1e4);
  RngStream init = RngStream(o.seed).split(0x5753);
  const auto net = init_two_layer<double>(o.construct.wstar_m, d, 1, eps_a, InitProfile::Theory, init);
  const Matrix W = construct_two_layer_Wstar(t, net, {fit}, eps);
  RngStream data = RngStream(o.seed).split(0x5754);
  const auto test = generate_dataset(d, o.construct.wstar_test, as_evaluator(t), PaddingMode::Raw, data);
  const auto rep = wstar_report(t, net, W, test.inputs);
  r.report["wstar"] = to_json(rep);
  r.report["m"] = o.construct.wstar_m;
  r.report["eps_a"] = eps_a;
  r.check("mean absolute error <= 0.1", rep.mae <= 0.1, rep.mae, 0.1);
  r.check("finite row norms", std::isfinite(rep.max_row_norm), rep.max_row_norm);
  return r;
}

/// Median layer-1 flip count against m1 on a log-log scale.
inline SuiteResult suite_coupling(const SuiteOptions& o) {
  SuiteResult r{"coupling"};
  const auto& c = o.coupling;
  std::ofstream csv;
  if (!o.coupling_csv.empty()) {
    csv.open(o.coupling_csv, std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + o.coupling_csv);
    csv << kCouplingHeader << '\n';
  }
  std::vector<double> lx, ly;
  for (Index m1 : c.m1) {
    std::vector<double> flips, flips2;
    for (int s = 0; s < c.seeds; ++s) {
      RngStream rng = RngStream(o.seed).split(static_cast<std::uint64_t>(m1)).split(static_cast<std::uint64_t>(s));
      auto net = init_three_layer<double>(m1, c.m2, c.d, 1, InitProfile::Theory, rng);
      net.seed = static_cast<std::uint64_t>(s);
      const Vector x = detail::unit_vector(c.d, rng);
      const Matrix Wp = c.mode == "adversarial" ? adversarial_first_layer(net, x, c.tau_w, c.kappa)
                                                : random_row_l4_perturbation(m1, c.d, c.tau_w, rng);
      Matrix Vp = Matrix::Zero(c.m2, m1);
      if (c.tau_v > 0) {
        Vp = sample_gaussian_matrix<double>(c.m2, m1, 1.0, rng);
        Vp *= c.tau_v / Vp.norm();
      }
      const auto rep = count_sign_flips(net, x, Wp, Vp);
      if (csv) write_coupling_row(csv, rep);
      flips.push_back(static_cast<double>(rep.flips1));
      flips2.push_back(static_cast<double>(rep.flips2));
    }
    const double med = median(flips);
    r.report["cells"].push_back({{"m1", m1}, {"median_flips1", med}, {"median_flips2", median(flips2)}});
    lx.push_back(std::log(static_cast<double>(m1)));
    ly.push_back(std::log(std::max(med, 0.5)));
  }
  r.report["mode"] = c.mode;
  r.report["tau_w"] = c.tau_w;
  r.report["seeds"] = c.seeds;
  r.report["note"] = "exponent only; polylog factors and constants are not tested";
  if (lx.size() >= 2) {
    const double slope = ls_slope(lx, ly);
    r.report["slope"] = slope;
    if (c.mode == "adversarial")
      r.check("flip-count slope in range", slope >= o.slope_lo && slope <= o.slope_hi, slope, o.slope_hi);
  }
  return r;
}

/// Backprop against central differences on random nets at kink-free inputs.
inline SuiteResult suite_gradients(const SuiteOptions& o) {
  SuiteResult r{"gradients"};
  RngStream rng = RngStream(o.seed).split(0x4752);
  const double h = 1e-5, margin = 1e-3, tol = 1e-4;
  double worst = 0;
  int done = 0, rejected = 0;
  while (done < o.configs) {
    const Index d = 2 + static_cast<Index>(rng.below(5)), k = 1 + static_cast<Index>(rng.below(3));
    const Vector x = detail::unit_vector(d, rng);
    const Vector g = sample_gaussian_vector(k, 1.0, rng);
    double err = 0;
    if (done % 2 == 0) {
      const Index m = 3 + static_cast<Index>(rng.below(20));
      auto net = init_two_layer<double>(m, d, k, 1.0, InitProfile::Experiment, rng);
      net.w_delta = sample_gaussian_matrix(m, d, 0.01, rng);
      if (preactivation(net, x).cwiseAbs().minCoeff() < margin) {
        ++rejected;
        continue;
      }
      const Matrix dW = backward(net, x, g);
      err = detail::rel_err(dW, detail::central_grad(net.w_delta, h, [&] { return g.dot(forward(net, x)); }));
    } else {
      const Index m1 = 3 + static_cast<Index>(rng.below(15)), m2 = 3 + static_cast<Index>(rng.below(15));
      auto net = init_three_layer<double>(m1, m2, d, k, InitProfile::Experiment, rng);
      net.w_delta = sample_gaussian_matrix(m1, d, 0.01, rng);
      net.v_delta = sample_gaussian_matrix(m2, m1, 0.01, rng);
      net.lambda = 0.2 + 0.8 * rng.uniform();
      const Vector z1 = net.weights_w() * x + net.b1;
      const Vector z2 = net.weights_v() * relu_of<double>(z1) + net.b2;
      if (std::min(z1.cwiseAbs().minCoeff(), z2.cwiseAbs().minCoeff()) < margin) {
        ++rejected;
        continue;
      }
      Matrix dW, dV;
      backward(net, x, g, dW, dV);
      auto f = [&] { return g.dot(forward(net, x)); };
      err = std::max(detail::rel_err(dW, detail::central_grad(net.w_delta, h, f)),
                     detail::rel_err(dV, detail::central_grad(net.v_delta, h, f)));
    }
    worst = std::max(worst, err);
    ++done;
  }
  r.report["configs"] = done;
  r.report["rejected_near_kink"] = rejected;
  r.report["max_relative_error"] = worst;
  r.check("relative error <= 1e-4", worst <= tol, worst, tol);
  return r;
}

/// Pseudo network with current-weight signs equals the forward pass bit for bit.
inline SuiteResult suite_pseudo(const SuiteOptions& o) {
  SuiteResult r{"pseudo"};
  RngStream rng = RngStream(o.seed).split(0x5053);
  int mismatches = 0;
  for (int t = 0; t < o.configs; ++t) {
    const Index d = 2 + static_cast<Index>(rng.below(6)), k = 1 + static_cast<Index>(rng.below(3));
    const Index m1 = 5 + static_cast<Index>(rng.below(40)), m2 = 5 + static_cast<Index>(rng.below(40));
    auto n3 = init_three_layer<double>(m1, m2, d, k, InitProfile::Experiment, rng);
    n3.w_delta = sample_gaussian_matrix(m1, d, 0.05, rng);
    n3.v_delta = sample_gaussian_matrix(m2, m1, 0.05, rng);
    n3.lambda = rng.uniform();
    const Vector x = detail::unit_vector(d, rng);
    if (pseudo_forward(n3, x, sign_pattern(n3, x, SignAt::Current), BiasMode::Full) != forward(n3, x)) ++mismatches;
    auto n2 = init_two_layer<double>(m1, d, k, 1.0, InitProfile::Experiment, rng);
    n2.w_delta = sample_gaussian_matrix(m1, d, 0.05, rng);
    if (pseudo_forward(n2, x, sign_pattern(n2, x, SignAt::Current), BiasMode::Full) != forward(n2, x)) ++mismatches;
  }
  r.report["configs"] = o.configs;
  r.check("pseudo == forward exactly", mismatches == 0, mismatches, 0);
  return r;
}

/// lambda_t = (1 - eta)^t, identity-Sigma v2 == v1, argmin ties.
inline SuiteResult suite_bookkeeping(const SuiteOptions& o) {
  SuiteResult r{"bookkeeping"};
  auto small_net = [](std::uint64_t seed) {
    RngStream rng(seed);
    auto net = init_three_layer<double>(12, 10, 4, 1, InitProfile::Theory, rng);
    net.w_delta = sample_gaussian_matrix(12, 4, 0.01, rng);
    net.v_delta = sample_gaussian_matrix(10, 12, 0.01, rng);
    return net;
  };
  RngStream drng = RngStream(o.seed).split(0x424b);
  const TargetEvaluator f = [](const Vector& x) { return Vector::Constant(1, 0.5 * std::sin(3 * x(0)) * x(1)); };
  const TrainData<double> data(generate_dataset(4, 25, f, PaddingMode::Raw, drng));

  TheorySgdConfig cfg;
  ThreeLayerTheoryParams p;
  p.smoothing = {0.01, 0.01};
  bool lam_ok = true;
  for (double eta : {0.1, 0.03, 0.005}) {
    cfg.eta = eta;
    cfg.steps = 40;
    cfg.inner_steps = 1;
    cfg.j_star_samples = 2;
    auto net = small_net(o.seed + 1);
    sgd_three_layer(net, data, p, cfg, RngStream(o.seed).split(1));
    lam_ok = lam_ok && net.lambda == std::pow(1.0 - eta, cfg.steps);
  }
  r.check("lambda_T == (1 - eta)^T exactly", lam_ok);

  cfg.eta = 0.05;
  cfg.steps = 4;
  cfg.inner_steps = 5;
  cfg.batch = 2;
  cfg.j_star_samples = 4;
  ThreeLayerTheoryParams v1, v2;
  v1.variant = ObjectiveKind::L1;
  v2.variant = ObjectiveKind::L2;
  v2.identity_sigma = true;
  v1.smoothing = v2.smoothing = {0.02, 0.02};
  v1.reg = v2.reg = {0.1, 0.1};
  auto n1 = small_net(o.seed + 2), n2 = small_net(o.seed + 2);
  const auto l1 = sgd_three_layer(n1, data, v1, cfg, RngStream(o.seed).split(2));
  const auto l2 = sgd_three_layer(n2, data, v2, cfg, RngStream(o.seed).split(2));
  bool same = n1.w_delta == n2.w_delta && n1.v_delta == n2.v_delta && l1.j_losses == l2.j_losses &&
              l1.j_star == l2.j_star && l1.records.size() == l2.records.size();
  for (std::size_t i = 0; same && i < l1.records.size(); ++i)
    same = l1.records[i].train_loss == l2.records[i].train_loss;
  r.check("v2 with identity Sigma reproduces v1 bit for bit", same);
  r.check("j* is the argmin of the recorded losses", l1.j_star == argmin_first(l1.j_losses), l1.j_star);
  r.check("argmin ties go to the smallest index",
          argmin_first({3.0, 1.0, 1.0, 2.0}) == 1 && argmin_first({0.5, 0.5}) == 0 &&
              argmin_first({2.0, 1.0, 0.5, 0.5}) == 2);
  return r;
}

/// NTK features against a forward difference of the network along random unit directions.
inline SuiteResult suite_ntk(const SuiteOptions& o) {
  SuiteResult r{"ntk"};
  RngStream rng = RngStream(o.seed).split(0x4e54);
  const double delta = 1e-4, tol = 1e-3;
  double worst = 0;
  for (int t = 0; t < o.directions; ++t) {
    const Index d = 3 + static_cast<Index>(rng.below(4));
    const Vector x = detail::unit_vector(d, rng);
    double lin = 0, fd = 0, gnorm = 0;
    if (t % 2 == 0) {
      const Index m = 10 + static_cast<Index>(rng.below(40));
      const auto net = init_two_layer<double>(m, d, 1, 1.0, InitProfile::Experiment, rng);
      Matrix wp = sample_gaussian_matrix(m, d, 1.0, rng);
      wp /= wp.norm();
      const Vector feat = ntk_feature_map(net, x);
      gnorm = feat.norm();
      lin = feat.dot(Eigen::Map<const Vector>(wp.data(), wp.size()));
      auto moved = net;
      moved.w_delta = delta * wp;
      fd = (forward(moved, x) - forward(net, x))(0) / delta;
    } else {
      const Index m1 = 10 + static_cast<Index>(rng.below(30)), m2 = 10 + static_cast<Index>(rng.below(30));
      const auto net = init_three_layer<double>(m1, m2, d, 1, InitProfile::Experiment, rng);
      Matrix wp = sample_gaussian_matrix(m1, d, 1.0, rng), vp = sample_gaussian_matrix(m2, m1, 1.0, rng);
      const double nrm = std::sqrt(wp.squaredNorm() + vp.squaredNorm());
      wp /= nrm;
      vp /= nrm;
      const Vector feat = ntk_feature_map(net, x);
      gnorm = feat.norm();
      lin = feat.head(wp.size()).dot(Eigen::Map<const Vector>(wp.data(), wp.size())) +
            feat.segment(wp.size(), vp.size()).dot(Eigen::Map<const Vector>(vp.data(), vp.size()));
      auto moved = net;
      moved.w_delta = delta * wp;
      moved.v_delta = delta * vp;
      fd = (forward(moved, x) - forward(net, x))(0) / delta;
    }
    // unit directions: the gradient norm bounds |lin|, and a pointwise ratio blows up when the
    // direction is nearly orthogonal to the gradient
    const double err = std::abs(lin - fd) / std::max({std::abs(fd), gnorm, 1e-12});
    worst = std::max(worst, err);
    r.report["errors"].push_back(err);
  }
  r.report["directions"] = o.directions;
  r.report["delta"] = delta;
  r.report["max_relative_error"] = worst;
  r.check("directional derivative within 1e-3 relative", worst <= tol, worst, tol);
  return r;
}

/// norm_ratio in [1, m] on random matrices, exactly 1 for equal rows and m for one nonzero row.
inline SuiteResult suite_norm_ratio(const SuiteOptions& o) {
  SuiteResult r{"norm-ratio"};
  RngStream rng = RngStream(o.seed).split(0x4e52);
  int out_of_range = 0, not_one = 0, not_m = 0;
  for (int t = 0; t < o.random_matrices; ++t) {
    const Index m = 1 + static_cast<Index>(rng.below(200)), d = 1 + static_cast<Index>(rng.below(10));
    Matrix W = sample_gaussian_matrix<double>(m, d, 1.0, rng);
    for (Index i = 0; i < m; ++i) {
      const double u = rng.uniform();
      if (u < 0.3) W.row(i).setZero();
      else if (u < 0.4) W.row(i) *= 1e3;
    }
    if (W.isZero(0.0)) W(0, 0) = 1;
    const double q = norm_ratio(W);
    if (!(q >= 1.0 && q <= static_cast<double>(m))) ++out_of_range;

    // rows differ only in signs, so their squared norms agree bit for bit
    const Vector v = sample_gaussian_vector(d, 1.0, rng);
    Matrix E(m, d);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < d; ++j) E(i, j) = rng.sign() * v(j);
    if (norm_ratio(E) != 1.0) ++not_one;

    Matrix S = Matrix::Zero(m, d);
    S.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)))) = v.transpose();
    if (norm_ratio(S) != static_cast<double>(m)) ++not_m;
  }
  r.report["matrices"] = o.random_matrices;
  r.check("ratio in [1, m]", out_of_range == 0, out_of_range, 0);
  r.check("equal row norms give exactly 1", not_one == 0, not_one, 0);
  r.check("single nonzero row gives exactly m", not_m == 0, not_m, 0);
  return r;
}

using SuiteFn = std::function<SuiteResult(const SuiteOptions&)>;

inline const std::map<std::string, SuiteFn>& suites() {
  static const std::map<std::string, SuiteFn> m{
      {"hermite", suite_hermite},     {"interval", suite_interval}, {"fit", suite_fit},
      {"wstar", suite_wstar},         {"coupling", suite_coupling}, {"gradients", suite_gradients},
      {"pseudo", suite_pseudo},       {"bookkeeping", suite_bookkeeping}, {"ntk", suite_ntk},
      {"norm-ratio", suite_norm_ratio}};
  return m;
}

/// Runs one named suite and writes <out_dir>/verify_<suite>.json when out_dir is given.
inline SuiteResult run_verification(const std::string& suite, const SuiteOptions& o,
                                    const std::filesystem::path& out_dir = {}) {
  const auto& all = suites();
  const auto it = all.find(suite);
  if (it == all.end()) throw ConfigError("unknown suite: " + suite);
  SuiteResult r = it->second(o);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir / ("verify_" + suite + ".json"), std::ios::binary);
    if (!f) throw ConfigError("cannot write report under " + out_dir.string());
    f << r.to_json().dump(2) << '\n';
  }
  return r;
}

inline SuiteOptions suite_options(const ExperimentConfig& c) {
  SuiteOptions o;
  o.seed = c.seeds.empty() ? 0 : c.seeds.front();
  o.construct = c.construct;
  o.coupling = c.coupling;
  return o;
}

/// Suites behind the non-training tasks.
inline std::vector<std::string> task_suites(Task t) {
  if (t == Task::CouplingSuite) return {"coupling"};
  if (t == Task::ConstructSuite) return {"hermite", "interval", "fit", "wstar"};
  return {};
}

}  // namespace overparam::harness
