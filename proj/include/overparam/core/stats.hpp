#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "overparam/core/error.hpp"

namespace overparam {

/// Welford accumulator; merge() combines shards (Chan et al.) so sharded sums are order-stable.
struct MeanAccumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }

  void merge(const MeanAccumulator& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    const double delta = o.mean - mean;
    mean += delta * nb / nt;
    m2 += o.m2 + delta * delta * na * nb / nt;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double std_err() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : kNaN; }

  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
};

inline double median(std::vector<double> v) {
  require_input(!v.empty(), "median: empty input");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Least-squares slope of y on x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require_input(x.size() == y.size() && x.size() >= 2, "ls_slope: need >= 2 matching points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require_input(sxx > 0, "ls_slope: x values are all equal");
  return sxy / sxx;
}

}  // namespace overparam
