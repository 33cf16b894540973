#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "overparam/core/error.hpp"

namespace overparam {

namespace normal01 {
inline const boost::math::normal& dist() {
  static const boost::math::normal n(0.0, 1.0);
  return n;
}
inline double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double cdf(double x) { return boost::math::cdf(dist(), x); }
inline double quantile(double p) { return boost::math::quantile(dist(), p); }
// Pr[|g| <= e]
inline double central(double e) { return std::erf(e / std::sqrt(2.0)); }
// pdf(0) - pdf(e) without cancellation for small e
inline double pdf_drop(double e) { return -std::expm1(-0.5 * e * e) / std::sqrt(2.0 * M_PI); }
}  // namespace normal01

/// A closed piece of I(y) on which s(y, .) is constant.
struct SignedPiece {
  double lo = 0, hi = 0;
  int sign = 0;
};

/// Internal quantities for y >= 0, kept for diagnostics.
///   mirrored case (y > y0): I = [-R,-L] u [L,R]
///   merged case (y <= y0):  I = [-c,c] split at e and d
struct PartitionShape {
  bool merged = false;
  double L = 0, R = 0;
  double e = 0, d = 0, c = 0;
};

/// Interval partition of the standard Gaussian for a given tau.
/// For every y in [-1,1]: Pr[g in I(y)] = tau, Pr[s=1] = Pr[s=-1], E[s g | g in I(y)] = y.
class IntervalPartition {
 public:
  IntervalPartition(double tau, double tol) : tau_(tau), tol_(tol) {
    c_ = normal01::quantile(0.5 + tau / 2);
    y0_ = normal01::pdf_drop(c_) / (tau / 2);
  }

  double tau() const { return tau_; }
  double tolerance() const { return tol_; }
  /// Half-width of the merged interval, Pr[|g| <= c] = tau.
  double c() const { return c_; }
  /// Turning point between the merged and mirrored cases.
  double turning_point() const { return y0_; }

  PartitionShape shape(double y) const {
    require_input(y >= 0.0 && y <= 1.0, "IntervalPartition::shape: y must be in [0,1]");
    PartitionShape sh;
    sh.c = c_;
    if (y > y0_) {
      solve_mirrored(y, sh);
    } else {
      sh.merged = true;
      solve_merged(y, sh);
    }
    return sh;
  }

  /// Pieces of I(y) with their sign, sorted by lo. Zero-width pieces are dropped.
  std::vector<SignedPiece> pieces(double y) const {
    require_input(y >= -1.0 && y <= 1.0, "IntervalPartition: y must be in [-1,1]");
    const PartitionShape sh = shape(std::abs(y));
    std::vector<SignedPiece> out;
    auto add = [&](double lo, double hi, int s) {
      if (hi > lo) out.push_back({lo, hi, s});
    };
    if (!sh.merged) {
      add(-sh.R, -sh.L, -1);
      add(sh.L, sh.R, 1);
    } else {
      add(-sh.c, -sh.d, -1);
      add(-sh.d, -sh.e, 1);
      add(-sh.e, 0.0, -1);
      add(0.0, sh.e, 1);
      add(sh.e, sh.d, -1);
      add(sh.d, sh.c, 1);
    }
    if (y < 0)
      for (auto& p : out) p.sign = -p.sign;
    return out;
  }

  /// I(y) as at most two disjoint closed intervals.
  std::vector<std::pair<double, double>> intervals(double y) const {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pieces(y)) {
      if (!out.empty() && p.lo <= out.back().second)
        out.back().second = std::max(out.back().second, p.hi);
      else
        out.emplace_back(p.lo, p.hi);
    }
    return out;
  }

  int s(double y, double g) const { return s_from_pieces(pieces(y), g); }

  static int s_from_pieces(const std::vector<SignedPiece>& ps, double g) {
    for (const auto& p : ps)
      if (g >= p.lo && g <= p.hi) return p.sign;
    return 0;
  }

 private:
  template <class F>
  double bisect(F&& f, double lo, double hi, const char* what, double target) const {
    // f increasing on [lo, hi]; returns the root of f(x) = target
    const double flo = f(lo), fhi = f(hi);
    if (hi - lo <= tol_) return 0.5 * (lo + hi);
    // the two cases meet at y0, where the endpoint formulas may differ in the last bits
    const double slack = 1e-12 * std::max(std::abs(flo), std::abs(fhi));
    if (flo > target && flo - target <= slack) return lo;
    if (fhi < target && target - fhi <= slack) return hi;
    if (!(flo <= target && fhi >= target)) {
      std::ostringstream os;
      os << "interval partition: " << what << " root not bracketed (tau=" << tau_ << ", target=" << target
         << ", f(lo)=" << flo << ", f(hi)=" << fhi << ")";
      throw ConstructionFailure(os.str());
    }
    for (int it = 0; it < 400 && hi - lo > tol_; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (f(mid) < target ? lo : hi) = mid;
    }
    if (!(hi - lo <= tol_) && std::nextafter(lo, hi) != hi) {
      std::ostringstream os;
      os << "interval partition: " << what << " bisection did not converge, width " << (hi - lo);
      throw ConstructionFailure(os.str());
    }
    return 0.5 * (lo + hi);
  }

  double right_end(double L) const { return normal01::quantile(normal01::cdf(L) + tau_ / 2); }

  void solve_mirrored(double y, PartitionShape& sh) const {
    // [L, R(L)] has mass tau/2; its conditional mean increases with L
    auto mean = [&](double L) { return (normal01::pdf(L) - normal01::pdf(right_end(L))) / (tau_ / 2); };
    const double lo = std::max(0.0, normal01::quantile(normal01::cdf(y) - tau_ / 2));
    sh.L = bisect(mean, lo, y, "mirrored L", y);
    sh.R = right_end(sh.L);
  }

  void solve_merged(double y, PartitionShape& sh) const {
    // e: E[|g| | |g| <= e] = y
    if (y > 0) {
      auto meanabs = [&](double e) { return e == 0 ? 0.0 : 2 * normal01::pdf_drop(e) / normal01::central(e); };
      sh.e = bisect(meanabs, 0.0, c_, "merged e", y);
    }
    const double tau_in = normal01::central(sh.e);
    // d in [e, c]: 2(2 pdf(d) - pdf(e) - pdf(c)) = y (tau - tau_in), decreasing in d
    const double target = y * (tau_ - tau_in);
    // written with pdf_drop so the small differences keep their precision:
    // 2 pdf(d) - pdf(e) - pdf(c) = drop(e) + drop(c) - 2 drop(d)
    auto F = [&](double d) { return -2 * (normal01::pdf_drop(sh.e) + normal01::pdf_drop(c_) - 2 * normal01::pdf_drop(d)); };
    sh.d = bisect(F, sh.e, c_, "merged d", -target);
  }

  double tau_, tol_;
  double c_, y0_;
};

inline IntervalPartition build_interval_partition(double tau, double tol = 1e-10) {
  if (!(tau > 0.0 && tau <= 0.01)) throw InvalidParameter("build_interval_partition: tau must be in (0, 1/100]");
  if (!(tol > 0.0)) throw InvalidParameter("build_interval_partition: tolerance must be positive");
  return IntervalPartition(tau, tol);
}

// ---- verification ----

namespace detail {
template <class F>
double gl(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

inline std::vector<std::pair<double, double>> merge(std::vector<std::pair<double, double>> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  return out;
}

inline double measure(const std::vector<std::pair<double, double>>& v) {
  double s = 0;
  for (const auto& iv : v) s += iv.second - iv.first;
  return s;
}
}  // namespace detail

/// Lebesgue measure of the symmetric difference of two finite unions of intervals.
inline double symmetric_difference_measure(const std::vector<std::pair<double, double>>& a,
                                           const std::vector<std::pair<double, double>>& b) {
  const auto A = detail::merge(a), B = detail::merge(b);
  double inter = 0;
  std::size_t i = 0, j = 0;
  while (i < A.size() && j < B.size()) {
    const double lo = std::max(A[i].first, B[j].first), hi = std::min(A[i].second, B[j].second);
    if (hi > lo) inter += hi - lo;
    (A[i].second < B[j].second ? i : j)++;
  }
  return detail::measure(A) + detail::measure(B) - 2 * inter;
}

struct IntervalPointReport {
  double y = 0;
  double prob = 0;       // Pr[g in I(y)]
  double p_plus = 0;     // Pr[s = 1]
  double p_minus = 0;    // Pr[s = -1]
  double cond_mean = 0;  // E[s g | g in I(y)]
  double span = 0;       // max s x - min s x over I(y)
  double max_abs_g = 0;  // I(y) inside [-2, 2]
  int n_intervals = 0;
};

struct IntervalReport {
  double tau = 0;
  std::vector<IntervalPointReport> points;
  double max_balanced_err = 0, max_symmetric_err = 0, max_unbiased_err = 0, max_span = 0;
  double lipschitz_K = 0;     // max |I(y1) sym-diff I(y2)| / |y1 - y2| on the fine grid
  double turning_point = 0;
  double turning_gap = 0;     // |I(y0 - delta) sym-diff I(y0 + delta)|
  double turning_delta = 0;
  bool inside_box = true;     // every I(y) within [-2, 2]
  int max_intervals = 0;

  bool passes(double tol = 1e-6) const {
    return max_balanced_err <= tol && max_symmetric_err <= tol && max_unbiased_err <= tol &&
           max_span <= 10 * tau && std::isfinite(lipschitz_K) && inside_box && max_intervals <= 2 &&
           turning_gap <= 4 * lipschitz_K * turning_delta + 1e-12;
  }
};

/// Checks the partition's properties with Gauss-Legendre quadrature on each piece, independent
/// of the CDF formulas used to build it. `grid` points are uniform on [-1, 1]; the Lipschitz
/// constant uses a grid `lipschitz_refine` times finer.
inline IntervalReport verify_interval_partition(const IntervalPartition& ip, int grid = 41, int lipschitz_refine = 10,
                                                double turning_delta = 1e-7) {
  require_input(grid >= 2, "verify_interval_partition: grid needs >= 2 points");
  IntervalReport rep;
  rep.tau = ip.tau();
  for (int t = 0; t < grid; ++t) {
    const double y = -1.0 + 2.0 * t / (grid - 1);
    const auto ps = ip.pieces(y);
    IntervalPointReport pr;
    pr.y = y;
    double smin = 1e300, smax = -1e300, sg = 0;
    for (const auto& p : ps) {
      const double mass = detail::gl(normal01::pdf, p.lo, p.hi);
      pr.prob += mass;
      (p.sign > 0 ? pr.p_plus : pr.p_minus) += mass;
      sg += p.sign * detail::gl([](double g) { return g * normal01::pdf(g); }, p.lo, p.hi);
      smin = std::min({smin, p.sign * p.lo, p.sign * p.hi});
      smax = std::max({smax, p.sign * p.lo, p.sign * p.hi});
      pr.max_abs_g = std::max({pr.max_abs_g, std::abs(p.lo), std::abs(p.hi)});
    }
    pr.cond_mean = sg / pr.prob;
    pr.span = smax - smin;
    pr.n_intervals = static_cast<int>(ip.intervals(y).size());
    rep.max_balanced_err = std::max(rep.max_balanced_err, std::abs(pr.prob - ip.tau()));
    rep.max_symmetric_err = std::max(rep.max_symmetric_err, std::abs(pr.p_plus - pr.p_minus));
    rep.max_unbiased_err = std::max(rep.max_unbiased_err, std::abs(pr.cond_mean - y));
    rep.max_span = std::max(rep.max_span, pr.span);
    rep.inside_box = rep.inside_box && pr.max_abs_g <= 2.0;
    rep.max_intervals = std::max(rep.max_intervals, pr.n_intervals);
    rep.points.push_back(pr);
  }
  const int fine = (grid - 1) * lipschitz_refine + 1;
  auto prev = ip.intervals(-1.0);
  for (int t = 1; t < fine; ++t) {
    const double y0 = -1.0 + 2.0 * (t - 1) / (fine - 1), y1 = -1.0 + 2.0 * t / (fine - 1);
    auto cur = ip.intervals(y1);
    rep.lipschitz_K = std::max(rep.lipschitz_K, symmetric_difference_measure(prev, cur) / (y1 - y0));
    prev = std::move(cur);
  }
  rep.turning_point = ip.turning_point();
  rep.turning_delta = turning_delta;
  rep.turning_gap = symmetric_difference_measure(ip.intervals(rep.turning_point - turning_delta),
                                                 ip.intervals(rep.turning_point + turning_delta));
  return rep;
}

}  // namespace overparam
