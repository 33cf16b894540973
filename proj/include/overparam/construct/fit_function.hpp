#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "overparam/construct/hermite.hpp"
#include "overparam/construct/interval_partition.hpp"
#include "overparam/core/numerics.hpp"
#include "overparam/core/rng.hpp"
#include "overparam/core/stats.hpp"
#include "overparam/targets/activation.hpp"

namespace overparam {

// h(alpha1, b0) = clamp( sum_i theta_i * hhat_i(alpha1) * q_i(b0), -C, C )
//
// hhat_i is h_i with its argument clipped to [-B_i, B_i]. With alpha = <w, x> and
// alpha1 = alpha x1 + sqrt(1 - x1^2) beta, E_beta h_i(alpha1) = x1^i h_i(alpha), and
// E_alpha[1{alpha + b >= 0} h_i(alpha)] = h_{i-1}(-b) pdf(b) for i >= 1 (Phi(b) for i = 0).
// So each term contributes theta_i p'_i x1^i with p'_i = E_b[q_i(b) h_{i-1}(-b) pdf(b)].

enum class FitGating {
  Matched,  // q_i(b) proportional to h_{i-1}(-b) pdf(b), scaled to sup 1
  Window,   // q_i(b) = 1{0 < -b <= 1/(2i)}
};

inline const char* to_string(FitGating g) { return g == FitGating::Matched ? "matched" : "window"; }

struct FitConfig {
  int degree = 20;
  double trunc_scale = 100.0;  // B_i = trunc_scale sqrt(i) + trunc_log sqrt(log 1/eps)
  double trunc_log = 10.0;
  FitGating gating = FitGating::Matched;
  int grid = 101;
  std::vector<double> mu_ladder = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12, 1e-14, 0.0};
};

class FitFunction {
 public:
  std::string phi_name;
  double eps = 0, C = 0;
  FitConfig config;
  std::vector<double> theta;   // coefficient on hhat_i(alpha1) q_i(b0)
  std::vector<double> p_prime; // p'_i
  std::vector<double> q_sq;    // E[q_i(b)^2]
  std::vector<double> q_norm;  // matched gating: sup_b |h_{i-1}(-b) pdf(b)|
  std::vector<double> radius;  // B_i
  double grid_residual = 0;    // max |sum_i theta_i p'_i x^i - phi(x)| on the calibration grid
  std::string chosen;          // "taylor" or "ridge mu=..."

  int degree() const { return static_cast<int>(theta.size()) - 1; }

  /// Gate q_i(b0) for all i into out.
  void gates(double b0, std::vector<double>& out, std::vector<double>& work) const {
    const int D = degree();
    out.assign(D + 1, 0.0);
    out[0] = 1.0;
    if (D == 0) return;
    if (config.gating == FitGating::Matched) {
      basis_.eval_all(D - 1, -b0, work);
      const double pdf = normal01::pdf(b0);
      for (int i = 1; i <= D; ++i) out[i] = work[i - 1] * pdf / q_norm[i];
    } else {
      for (int i = 1; i <= D; ++i) out[i] = (b0 < 0 && -b0 <= 0.5 / i) ? 1.0 : 0.0;
    }
  }

  /// Sum before the final clamp.
  double raw(double alpha1, double b0) const {
    thread_local std::vector<double> q, work, he;
    gates(b0, q, work);
    const int D = degree();
    double acc = theta[0];
    if (std::abs(alpha1) <= radius_min_) {
      basis_.eval_all(D, alpha1, he);
      for (int i = 1; i <= D; ++i) acc += theta[i] * he[i] * q[i];
    } else {
      for (int i = 1; i <= D; ++i) {
        const double a = std::clamp(alpha1, -radius[i], radius[i]);
        acc += theta[i] * basis_.eval(i, a) * q[i];
      }
    }
    return acc;
  }

  double operator()(double alpha1, double b0) const { return std::clamp(raw(alpha1, b0), -C, C); }

  /// Closed form of E[1{alpha1 x1 + beta1 sqrt(1-x1^2) + b0 >= 0} hhat_i(alpha1) q_i(b0)], ignoring clipping.
  double psi(int i, double x1) const { return p_prime.at(i) * std::pow(x1, i); }

  /// Closed-form E[h^2] of the unclamped sum (h_i orthogonal, gates independent of alpha1).
  double second_moment() const {
    double s = 0;
    for (int i = 0; i <= degree(); ++i) s += theta[i] * theta[i] * HermiteBasis::norm_sq(i) * q_sq[i];
    return s;
  }

  /// Polynomial the identity reproduces in expectation: sum_i theta_i p'_i x^i.
  double identity_poly(double x1) const {
    double s = 0;
    for (int i = degree(); i >= 0; --i) s = s * x1 + theta[i] * p_prime[i];
    return s;
  }

  /// psi_i(x1) by two-dimensional quadrature over (alpha1, b0), for checking the closed form.
  double psi_quadrature(int i, double x1) const {
    require_input(std::abs(x1) < 1.0, "psi_quadrature: |x1| must be < 1");
    const double s = std::sqrt(1 - x1 * x1);
    std::vector<double> q, work;
    auto inner = [&](double b) {
      gates(b, q, work);
      const double qi = q[i];
      if (qi == 0.0) return 0.0;
      auto f = [&](double a) {
        const double ai = std::clamp(a, -radius[i], radius[i]);
        return normal01::pdf(a) * normal01::cdf((a * x1 + b) / s) * basis_.eval(i, ai);
      };
      return qi * normal01::pdf(b) * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -14.0, 14.0, 8, 1e-13);
    };
    if (config.gating == FitGating::Window) return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, i == 0 ? -14.0 : -0.5 / i, i == 0 ? 14.0 : 0.0, 8, 1e-12);
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, -14.0, 14.0, 8, 1e-12);
  }

  explicit FitFunction(int degree) : basis_(std::max(degree, 1)) {}

  void finalize_radius() {
    radius_min_ = kInf;
    for (int i = 1; i <= degree(); ++i) radius_min_ = std::min(radius_min_, radius[i]);
  }

 private:
  HermiteBasis basis_;
  double radius_min_ = kInf;
};

namespace detail {

inline double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-14);
}

// sup_u |h_n(u) pdf(u)| by a fine scan; only used as a scale.
inline double matched_sup(const HermiteBasis& basis, int n) {
  const double lim = 3.0 * std::sqrt(n + 1.0) + 6.0;
  double best = 0;
  for (double u = -lim; u <= lim; u += 1e-3) best = std::max(best, std::abs(basis.eval(n, u) * normal01::pdf(u)));
  return best;
}

}  // namespace detail

/// Builds h for phi. The Taylor-derived coefficients theta_i = c_i / p'_i are the first
/// candidate; ridge solves of the identity on the grid (penalising E[h^2]) are the rest.
/// Among candidates with grid residual <= eps/4 the one with the smallest E[h^2] is kept.
inline FitFunction build_fit_function(const SmoothActivation& phi, double eps, double C, const FitConfig& cfg = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("build_fit_function: eps must be in (0, 1)");
  if (!(C > 0.0)) throw InvalidParameter("build_fit_function: C must be positive");
  if (cfg.degree < 0 || cfg.grid < 2) throw InvalidParameter("build_fit_function: bad degree or grid");
  if (phi.taylor.empty()) throw InvalidParameter("build_fit_function: activation has no Taylor data");

  const int D = cfg.degree;
  FitFunction fit(D);
  fit.phi_name = phi.name;
  fit.eps = eps;
  fit.C = C;
  fit.config = cfg;
  fit.p_prime.assign(D + 1, 0.0);
  fit.q_sq.assign(D + 1, 0.0);
  fit.q_norm.assign(D + 1, 1.0);
  fit.radius.assign(D + 1, kInf);

  const HermiteBasis basis(std::max(D, 1));
  fit.p_prime[0] = 0.5;
  fit.q_sq[0] = 1.0;
  for (int i = 1; i <= D; ++i) {
    fit.radius[i] = cfg.trunc_scale * std::sqrt(static_cast<double>(i)) + cfg.trunc_log * std::sqrt(std::log(1.0 / eps));
    if (cfg.gating == FitGating::Matched) {
      const double sup = detail::matched_sup(basis, i - 1);
      fit.q_norm[i] = sup;
      auto g = [&](double b) {
        const double v = basis.eval(i - 1, -b) * normal01::pdf(b);
        return v * v;
      };
      fit.p_prime[i] = detail::gk([&](double b) { return g(b) * normal01::pdf(b) / sup; }, -20, 20);
      fit.q_sq[i] = detail::gk([&](double b) { return g(b) / (sup * sup) * normal01::pdf(b); }, -20, 20);
    } else {
      const double lo = -0.5 / i;
      fit.p_prime[i] = detail::gk([&](double b) { return basis.eval(i - 1, -b) * normal01::pdf(b) * normal01::pdf(b); }, lo, 0.0);
      fit.q_sq[i] = normal01::cdf(0.0) - normal01::cdf(lo);
    }
    if (!(std::abs(fit.p_prime[i]) > 0)) {
      std::ostringstream os;
      os << "build_fit_function: p'_" << i << " vanished";
      throw ConstructionFailure(os.str());
    }
  }
  fit.finalize_radius();

  // Calibration grid.
  const int G = cfg.grid;
  Matrix X(G, D + 1);
  Vector f(G);
  for (int j = 0; j < G; ++j) {
    const double x = -1.0 + 2.0 * j / (G - 1);
    double pw = 1.0;
    for (int i = 0; i <= D; ++i, pw *= x) X(j, i) = pw;
    f(j) = phi(x);
  }
  // u_i = theta_i p'_i; E[h^2] = sum_i weight_i u_i^2
  Vector weight(D + 1);
  for (int i = 0; i <= D; ++i)
    weight(i) = HermiteBasis::norm_sq(i) * fit.q_sq[i] / (fit.p_prime[i] * fit.p_prime[i]);

  struct Candidate {
    Vector u;
    double residual, moment;
    std::string label;
  };
  std::vector<Candidate> cands;
  auto add = [&](const Vector& u, std::string label) {
    const double res = (X * u - f).cwiseAbs().maxCoeff();
    const double mom = (weight.array() * u.array().square()).sum();
    if (std::isfinite(res) && std::isfinite(mom)) cands.push_back({u, res, mom, std::move(label)});
  };

  Vector taylor = Vector::Zero(D + 1);
  for (int i = 0; i <= D && i < static_cast<int>(phi.taylor.size()); ++i) taylor(i) = phi.taylor[i];
  add(taylor, "taylor");
  for (double mu : cfg.mu_ladder) {
    Matrix A(G + D + 1, D + 1);
    Vector rhs = Vector::Zero(G + D + 1);
    A.topRows(G) = X;
    A.bottomRows(D + 1) = (std::sqrt(mu) * weight.cwiseSqrt()).asDiagonal();
    rhs.head(G) = f;
    const Vector u = A.colPivHouseholderQr().solve(rhs);
    std::ostringstream os;
    os << "ridge mu=" << mu;
    add(u, os.str());
  }
  if (cands.empty()) throw ConstructionFailure("build_fit_function: no finite candidate");

  const Candidate* best = nullptr;
  // A Taylor series that is already exact on the grid (polynomial phi of degree <= D) is kept as is.
  const double exact_tol = 1e-12 * std::max(1.0, f.cwiseAbs().maxCoeff());
  if (cands.front().label == "taylor" && cands.front().residual <= exact_tol) {
    best = &cands.front();
  } else {
    for (const auto& c : cands)
      if (c.residual <= eps / 4 && (!best || c.moment < best->moment)) best = &c;
  }
  if (!best) {
    for (const auto& c : cands)
      if (!best || c.residual < best->residual) best = &c;
  }
  if (best->residual > 2 * eps) {
    std::ostringstream os;
    os << "build_fit_function: identity residual " << best->residual << " exceeds 2*eps=" << 2 * eps << " for "
       << phi.name << " (degree " << D << ")";
    throw ConstructionFailure(os.str());
  }
  fit.theta.resize(D + 1);
  for (int i = 0; i <= D; ++i) fit.theta[i] = best->u(i) / fit.p_prime[i];
  fit.grid_residual = best->residual;
  fit.chosen = best->label;
  return fit;
}

struct FitPointReport {
  double x1 = 0, target = 0, estimate = 0, std_err = 0, residual = 0;
};

struct FitReport {
  std::string phi_name;
  double eps = 0, C = 0;
  std::uint64_t samples = 0, seed = 0;
  std::vector<FitPointReport> points;
  double max_residual = 0;
  double max_excess = 0;          // max over the grid of residual - 3 std_err
  double second_moment = 0, second_moment_se = 0;
  double second_moment_bound = 0; // user-supplied c_s^2, 0 when not given
  double max_abs_h = 0;
  double lipschitz = 0;           // max sampled |dh/d alpha1|
  double grid_residual = 0;
  std::string chosen;

  bool identity_holds() const { return max_excess <= eps; }
  bool bounded() const { return max_abs_h <= C; }
  bool lipschitz_ok() const { return lipschitz <= C; }
  bool moment_ok() const { return second_moment_bound <= 0 || second_moment <= second_moment_bound; }
};

inline std::vector<double> uniform_grid(int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> g(n);
  for (int j = 0; j < n; ++j) g[j] = n == 1 ? lo : lo + (hi - lo) * j / (n - 1);
  return g;
}

/// Monte-Carlo check of E[1{alpha1 x1 + beta1 sqrt(1-x1^2) + b0 >= 0} h(alpha1, b0)] ~ phi(x1),
/// with the same triples reused across the grid. Sharded; shard results merge in index order.
inline FitReport verify_fit_function(const FitFunction& h, const SmoothActivation& phi, const std::vector<double>& grid,
                                     std::uint64_t samples, const RngStream& rng, double cs_bound = 0.0,
                                     std::uint64_t lipschitz_samples = 100000) {
  for (double x : grid) require_input(x >= -1.0 && x <= 1.0, "verify_fit_function: grid must lie in [-1,1]");
  require_input(samples >= 2, "verify_fit_function: need >= 2 samples");
  const std::size_t K = grid.size();
  std::vector<double> perp(K);
  for (std::size_t k = 0; k < K; ++k) perp[k] = std::sqrt(std::max(0.0, 1 - grid[k] * grid[k]));

  constexpr std::uint64_t kShard = 1u << 16;
  const std::uint64_t shards = (samples + kShard - 1) / kShard;
  std::vector<MeanAccumulator> acc(K);
  MeanAccumulator sq;
  double max_abs = 0;
  for (std::uint64_t s = 0; s < shards; ++s) {
    RngStream r = rng.split(s);
    const std::uint64_t n = std::min(kShard, samples - s * kShard);
    std::vector<MeanAccumulator> local(K);
    MeanAccumulator lsq;
    for (std::uint64_t t = 0; t < n; ++t) {
      const double a1 = r.normal(), b1 = r.normal(), b0 = r.normal();
      const double v = h(a1, b0);
      max_abs = std::max(max_abs, std::abs(v));
      lsq.add(v * v);
      for (std::size_t k = 0; k < K; ++k) local[k].add(a1 * grid[k] + b1 * perp[k] + b0 >= 0 ? v : 0.0);
    }
    for (std::size_t k = 0; k < K; ++k) acc[k].merge(local[k]);
    sq.merge(lsq);
  }

  FitReport rep;
  rep.phi_name = h.phi_name;
  rep.eps = h.eps;
  rep.C = h.C;
  rep.samples = samples;
  rep.seed = rng.seed();
  rep.grid_residual = h.grid_residual;
  rep.chosen = h.chosen;
  for (std::size_t k = 0; k < K; ++k) {
    FitPointReport p;
    p.x1 = grid[k];
    p.target = phi(grid[k]);
    p.estimate = acc[k].mean;
    p.std_err = acc[k].std_err();
    p.residual = std::abs(p.estimate - p.target);
    rep.max_residual = std::max(rep.max_residual, p.residual);
    rep.max_excess = std::max(rep.max_excess, p.residual - 3 * p.std_err);
    rep.points.push_back(p);
  }
  rep.second_moment = sq.mean;
  rep.second_moment_se = sq.std_err();
  rep.second_moment_bound = cs_bound > 0 ? cs_bound * cs_bound : 0.0;
  rep.max_abs_h = max_abs;

  RngStream lr = rng.split(~0ull);
  const double delta = 1e-4;
  for (std::uint64_t t = 0; t < lipschitz_samples; ++t) {
    const double a1 = lr.normal(), b0 = lr.normal();
    rep.lipschitz = std::max(rep.lipschitz, std::abs(h(a1 + delta, b0) - h(a1, b0)) / delta);
  }
  return rep;
}

inline nlohmann::json to_json(const FitReport& r) {
  nlohmann::json j;
  j["phi"] = r.phi_name;
  j["eps"] = r.eps;
  j["C"] = r.C;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["calibration"] = {{"grid_residual", r.grid_residual}, {"chosen", r.chosen}};
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"x1", p.x1}, {"target", p.target}, {"estimate", p.estimate}, {"std_err", p.std_err},
                   {"residual", p.residual}});
  j["summary"] = {{"max_residual", r.max_residual},
                  {"max_residual_minus_3se", r.max_excess},
                  {"second_moment", r.second_moment},
                  {"second_moment_std_err", r.second_moment_se},
                  {"second_moment_bound", r.second_moment_bound},
                  {"max_abs_h", r.max_abs_h},
                  {"lipschitz_alpha1", r.lipschitz},
                  {"identity_holds", r.identity_holds()},
                  {"bounded", r.bounded()},
                  {"lipschitz_le_C", r.lipschitz_ok()}};
  return j;
}

inline nlohmann::json to_json(const IntervalReport& r) {
  nlohmann::json j;
  j["tau"] = r.tau;
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"y", p.y},
                   {"prob", p.prob},
                   {"p_plus", p.p_plus},
                   {"p_minus", p.p_minus},
                   {"cond_mean", p.cond_mean},
                   {"span", p.span},
                   {"intervals", p.n_intervals}});
  j["summary"] = {{"max_balanced_err", r.max_balanced_err},
                  {"max_symmetric_err", r.max_symmetric_err},
                  {"max_unbiased_err", r.max_unbiased_err},
                  {"max_span", r.max_span},
                  {"span_bound", 10 * r.tau},
                  {"lipschitz_K", r.lipschitz_K},
                  {"turning_point", r.turning_point},
                  {"turning_gap", r.turning_gap},
                  {"turning_delta", r.turning_delta},
                  {"inside_box", r.inside_box},
                  {"passes", r.passes()}};
  return j;
}

}  // namespace overparam
