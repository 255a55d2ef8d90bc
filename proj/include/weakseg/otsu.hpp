#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

#include "weakseg/image.hpp"

namespace weakseg {

inline constexpr int kHistogramBins = 256;

/// Bin of an intensity in [0,1]: floor(v * 255 + 0.5), clamped to [0,255].
inline int intensity_bin(float v) {
  const double b = std::floor(static_cast<double>(v) * 255.0 + 0.5);
  return b <= 0.0 ? 0 : b >= 255.0 ? 255 : static_cast<int>(b);
}

struct Histogram256 {
  std::array<std::uint64_t, kHistogramBins> counts{};
  std::uint64_t total = 0;

  void add(float v) {
    ++counts[static_cast<std::size_t>(intensity_bin(v))];
    ++total;
  }

  /// True when at most one bin is occupied.
  bool single_level() const {
    int occupied = 0;
    for (auto c : counts) occupied += c != 0;
    return occupied <= 1;
  }

  template <typename Tag>
  static Histogram256 of(const Image<float, Tag>& img) {
    Histogram256 h;
    for (float v : img.data()) h.add(v);
    return h;
  }
};

struct OtsuResult3 {
  int k1 = 0;
  int k2 = 0;
  double sigma_b = 0.0;
  bool operator==(const OtsuResult3&) const = default;
};

/// Contribution P_c * (mu_c - mu)^2 of one class given its pixel count and
/// sum of bin indices. Empty classes contribute nothing.
inline double class_variance_term(std::uint64_t count, std::uint64_t index_sum, double total, double mean) {
  if (count == 0) return 0.0;
  const double p = static_cast<double>(count) / total;
  const double mu = static_cast<double>(index_sum) / static_cast<double>(count);
  const double d = mu - mean;
  return p * d * d;
}

namespace detail {

struct Cumulative {
  std::array<std::uint64_t, kHistogramBins> count{};  // pixels in bins [0, i]
  std::array<std::uint64_t, kHistogramBins> sum{};    // sum of bin index over [0, i]
  double mean = 0.0;
  double total = 0.0;
};

inline Cumulative cumulate(const Histogram256& h) {
  if (h.total == 0) throw Error(ErrorKind::Data, "Otsu threshold of an empty histogram");
  Cumulative c;
  std::uint64_t n = 0, s = 0;
  for (int i = 0; i < kHistogramBins; ++i) {
    n += h.counts[static_cast<std::size_t>(i)];
    s += static_cast<std::uint64_t>(i) * h.counts[static_cast<std::size_t>(i)];
    c.count[static_cast<std::size_t>(i)] = n;
    c.sum[static_cast<std::size_t>(i)] = s;
  }
  c.total = static_cast<double>(n);
  c.mean = static_cast<double>(s) / c.total;
  return c;
}

}  // namespace detail

/// Two-class Otsu: the k maximizing the between-class variance of the
/// classes [0,k] and [k+1,255]. Ties resolve to the smallest k.
inline int otsu2(const Histogram256& h) {
  const auto c = detail::cumulate(h);
  const std::uint64_t n = c.count[255];
  const std::uint64_t s = c.sum[255];
  int best_k = 0;
  double best = -1.0;
  for (int k = 0; k < kHistogramBins; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double sigma = class_variance_term(c.count[i], c.sum[i], c.total, c.mean) +
                         class_variance_term(n - c.count[i], s - c.sum[i], c.total, c.mean);
    if (sigma > best) {
      best = sigma;
      best_k = k;
    }
  }
  return best_k;
}

/// Three-class Otsu over every pair 0 <= k1 <= k2 <= 255 with classes
/// [0,k1], [k1+1,k2], [k2+1,255]. Ties resolve to the lexicographically
/// smallest (k1, k2).
inline OtsuResult3 otsu3(const Histogram256& h) {
  const auto c = detail::cumulate(h);
  const std::uint64_t n = c.count[255];
  const std::uint64_t s = c.sum[255];
  OtsuResult3 best{0, 0, -1.0};
  for (int k1 = 0; k1 < kHistogramBins; ++k1) {
    const auto i1 = static_cast<std::size_t>(k1);
    const double t1 = class_variance_term(c.count[i1], c.sum[i1], c.total, c.mean);
    for (int k2 = k1; k2 < kHistogramBins; ++k2) {
      const auto i2 = static_cast<std::size_t>(k2);
      const double sigma = t1 +
                           class_variance_term(c.count[i2] - c.count[i1], c.sum[i2] - c.sum[i1], c.total, c.mean) +
                           class_variance_term(n - c.count[i2], s - c.sum[i2], c.total, c.mean);
      if (sigma > best.sigma_b) best = {k1, k2, sigma};
    }
  }
  return best;
}

}  // namespace weakseg
