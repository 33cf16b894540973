#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "overparam/core/error.hpp"
#include "overparam/core/numerics.hpp"

namespace overparam {

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Seeded random stream. Equal (seed, stream) pairs give equal draws.
/// Child streams derived with split() are independent of the parent and of each other.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6f766572u};
    eng_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  RngStream split(std::uint64_t child) const {
    return RngStream(seed_, detail::splitmix64(stream_ ^ detail::splitmix64(child + 1)));
  }

  double normal() { return gauss_(eng_); }
  double normal(double stddev) { return stddev * gauss_(eng_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  double sign() { return (eng_() >> 63) ? 1.0 : -1.0; }
  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_); }

  engine_type& engine() noexcept { return eng_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  engine_type eng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// Entries i.i.d. N(0, variance). Draws are taken in row-major order in double and cast.
template <class S = double>
MatrixT<S> sample_gaussian_matrix(Index rows, Index cols, double variance, RngStream& rng) {
  if (!(variance >= 0.0)) throw InvalidParameter("sample_gaussian_matrix: variance must be >= 0");
  if (rows < 0 || cols < 0) throw InvalidParameter("sample_gaussian_matrix: negative dimension");
  MatrixT<S> out(rows, cols);
  const double sd = std::sqrt(variance);
  S* p = out.data();
  for (Index i = 0; i < out.size(); ++i) p[i] = static_cast<S>(rng.normal(sd));
  return out;
}

template <class S = double>
VectorT<S> sample_gaussian_vector(Index n, double variance, RngStream& rng) {
  if (!(variance >= 0.0)) throw InvalidParameter("sample_gaussian_vector: variance must be >= 0");
  VectorT<S> out(n);
  const double sd = std::sqrt(variance);
  for (Index i = 0; i < n; ++i) out(i) = static_cast<S>(rng.normal(sd));
  return out;
}

/// Diagonal of a random sign matrix: entries +1 / -1 with probability 1/2 each.
template <class S = double>
VectorT<S> sample_sign_diagonal(Index n, RngStream& rng) {
  if (n < 1) throw InvalidParameter("sample_sign_diagonal: n must be >= 1");
  VectorT<S> out(n);
  for (Index i = 0; i < n; ++i) out(i) = static_cast<S>(rng.sign());
  return out;
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<Index> random_permutation(Index n, RngStream& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

}  // namespace overparam
