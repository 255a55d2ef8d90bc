#pragma once

// Brute-force reference implementations used only by the tests. They are
// written without calling the library routines they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "weakseg/image.hpp"
#include "weakseg/metrics.hpp"
#include "weakseg/otsu.hpp"

namespace oracle {

using weakseg::BinaryMask;
using weakseg::Raster;
using weakseg::ScoreMap;

/// Reflect-101 by repeated reflection.
inline int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

template <typename Img>
auto px(const Img& img, int x, int y) {
  return img(reflect(x, img.width()), reflect(y, img.height()));
}

/// Direct nested-loop bilateral filter with weight normalization.
inline std::vector<double> bilateral(const Raster& img, double sigma_s, double sigma_r, int d) {
  std::vector<double> out(img.size());
  for (int i = 0; i < img.height(); ++i)
    for (int j = 0; j < img.width(); ++j) {
      double num = 0, den = 0;
      const double c = img(j, i);
      for (int y = i - d; y <= i + d; ++y)
        for (int x = j - d; x <= j + d; ++x) {
          const double v = px(img, x, y);
          const double s = std::exp(-((i - y) * (i - y) + (j - x) * (j - x)) / (2 * sigma_s * sigma_s));
          const double r = std::exp(-((c - v) * (c - v)) / (2 * sigma_r * sigma_r));
          num += s * r * v;
          den += s * r;
        }
      out[static_cast<std::size_t>(i) * img.width() + j] = num / den;
    }
  return out;
}

/// Normalized Gaussian convolution over the same window.
inline std::vector<double> gaussian_blur(const Raster& img, double sigma, int d) {
  std::vector<double> out(img.size());
  for (int i = 0; i < img.height(); ++i)
    for (int j = 0; j < img.width(); ++j) {
      double num = 0, den = 0;
      for (int y = -d; y <= d; ++y)
        for (int x = -d; x <= d; ++x) {
          const double g = std::exp(-(x * x + y * y) / (2 * sigma * sigma));
          num += g * px(img, j + x, i + y);
          den += g;
        }
      out[static_cast<std::size_t>(i) * img.width() + j] = num / den;
    }
  return out;
}

/// Min or max over the window [-w/2, w-1-w/2] x [-h/2, h-1-h/2], iterated.
template <typename Img>
Img rank_filter(Img img, int w, int h, int iterations, bool take_max) {
  for (int it = 0; it < iterations; ++it) {
    Img out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        auto best = px(img, x - w / 2, y - h / 2);
        for (int dy = -h / 2; dy < h - h / 2; ++dy)
          for (int dx = -w / 2; dx < w - w / 2; ++dx) {
            const auto v = px(img, x + dx, y + dy);
            best = take_max ? std::max(best, v) : std::min(best, v);
          }
        out(x, y) = best;
      }
    img = out;
  }
  return img;
}

/// Count and index sum of every bin interval [lo, hi], built by extending
/// each interval one bin at a time.
struct IntervalSums {
  std::vector<std::uint64_t> n, s;  // 256 x 256, row = lo
  explicit IntervalSums(const weakseg::Histogram256& h) : n(256 * 256, 0), s(256 * 256, 0) {
    for (int lo = 0; lo < 256; ++lo) {
      std::uint64_t cn = 0, cs = 0;
      for (int hi = lo; hi < 256; ++hi) {
        cn += h.counts[hi];
        cs += static_cast<std::uint64_t>(hi) * h.counts[hi];
        n[lo * 256 + hi] = cn;
        s[lo * 256 + hi] = cs;
      }
    }
  }
  std::pair<std::uint64_t, std::uint64_t> get(int lo, int hi) const {
    if (lo > hi) return {0, 0};
    return {n[lo * 256 + hi], s[lo * 256 + hi]};
  }
};

/// Between-class variance P1(mu1-mu)^2 + P2(mu2-mu)^2 + ... of a partition
/// given as bin intervals.
inline double sigma_b(const IntervalSums& sums, const std::vector<std::pair<int, int>>& classes) {
  const auto [n_all, s_all] = sums.get(0, 255);
  const double total = static_cast<double>(n_all);
  const double mean = static_cast<double>(s_all) / total;
  double sigma = 0.0;
  for (auto [lo, hi] : classes) {
    const auto [n, s] = sums.get(lo, hi);
    if (n == 0) {
      sigma += 0.0;
      continue;
    }
    const double p = static_cast<double>(n) / total;
    const double mu = static_cast<double>(s) / static_cast<double>(n);
    const double d = mu - mean;
    sigma += p * d * d;
  }
  return sigma;
}

inline int otsu2(const weakseg::Histogram256& h) {
  const IntervalSums sums(h);
  int best_k = -1;
  double best = 0;
  for (int k = 0; k <= 255; ++k) {
    const double s = sigma_b(sums, {{0, k}, {k + 1, 255}});
    if (best_k < 0 || s > best) {
      best = s;
      best_k = k;
    }
  }
  return best_k;
}

inline weakseg::OtsuResult3 otsu3(const weakseg::Histogram256& h) {
  const IntervalSums sums(h);
  weakseg::OtsuResult3 best{-1, -1, 0};
  for (int k1 = 0; k1 <= 255; ++k1)
    for (int k2 = k1; k2 <= 255; ++k2) {
      const double s = sigma_b(sums, {{0, k1}, {k1 + 1, k2}, {k2 + 1, 255}});
      if (best.k1 < 0 || s > best.sigma_b) best = {k1, k2, s};
    }
  return best;
}

/// Patch origins along one axis: 0, stride, ... until a patch reaches the end.
inline std::vector<int> axis_origins(int dim, int patch, int stride) {
  std::vector<int> o{0};
  while (o.back() + patch < dim) o.push_back(o.back() + stride);
  return o;
}

inline int quantize(float v) {
  const long q = std::lround(std::floor(static_cast<double>(v) * 255.0 + 0.5));
  return static_cast<int>(std::clamp(q, 0L, 255L));
}

/// Per-pixel unanimity: enumerate every patch containing the pixel, compute
/// its threshold from its mirror-padded histogram, AND the votes.
template <typename ThresholdFn>
BinaryMask patch_threshold(const Raster& r, int patch, int stride, ThresholdFn threshold_of) {
  const auto xs = axis_origins(r.width(), patch, stride);
  const auto ys = axis_origins(r.height(), patch, stride);
  std::map<std::pair<int, int>, int> cache;
  auto patch_threshold = [&](int ox, int oy) {
    auto key = std::make_pair(ox, oy);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    weakseg::Histogram256 h;
    std::set<int> levels;
    for (int y = oy; y < oy + patch; ++y)
      for (int x = ox; x < ox + patch; ++x) {
        const int b = quantize(px(r, x, y));
        h.counts[b]++;
        h.total++;
        levels.insert(b);
      }
    const int t = levels.size() <= 1 ? -1 : threshold_of(h);
    cache[key] = t;
    return t;
  };
  BinaryMask out(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x) {
      bool all = true;
      int covering = 0;
      for (int oy : ys)
        for (int ox : xs)
          if (ox <= x && x < ox + patch && oy <= y && y < oy + patch) {
            ++covering;
            all = all && quantize(r(x, y)) <= patch_threshold(ox, oy);
          }
      out(x, y) = (covering > 0 && all) ? 1 : 0;
    }
  return out;
}

struct Curve {
  double f1 = 0;
  double best_t = 0;
  std::vector<double> p, r;
};

/// Full 101-point curve by per-pixel counting at every threshold.
inline Curve macro_f1(const std::vector<ScoreMap>& preds, const std::vector<BinaryMask>& gts) {
  Curve c;
  c.f1 = -1;
  for (int k = 0; k <= 100; ++k) {
    const double t = k / 100.0;
    double ps = 0, rs = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t j = 0; j < preds[i].size(); ++j) {
        const bool p = preds[i][j] >= t;
        const bool g = gts[i][j] == 1;
        if (p && g) tp++;
        if (p && !g) fp++;
        if (!p && g) fn++;
      }
      ps += (tp + fp) == 0 ? 0 : tp / (tp + fp);
      rs += (tp + fn) == 0 ? 0 : tp / (tp + fn);
    }
    const double p = ps / preds.size(), r = rs / preds.size();
    c.p.push_back(p);
    c.r.push_back(r);
    const double f1 = (p + r) == 0 ? 0 : 2 * p * r / (p + r);
    if (f1 > c.f1) {
      c.f1 = f1;
      c.best_t = t;
    }
  }
  return c;
}

// --- generators --------------------------------------------------------------

inline Raster random_raster(std::mt19937& rng, int w, int h) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Raster r(w, h);
  for (auto& v : r.data()) v = u(rng);
  return r;
}

/// Random raster with a few structured features: smooth background, dark
/// strokes and noise, quantized to 8 bits like real imagery.
inline Raster random_crackish(std::mt19937& rng, int w, int h) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  const float base = 0.4f + 0.4f * u(rng);
  const float noise = 0.15f * u(rng);
  Raster r(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) r(x, y) = std::clamp(base + noise * (u(rng) - 0.5f), 0.0f, 1.0f);
  const int strokes = static_cast<int>(u(rng) * 3);
  for (int s = 0; s < strokes; ++s) {
    float fx = u(rng) * w, fy = u(rng) * h;
    const float ang = u(rng) * 6.2832f;
    const float dark = 0.05f + 0.2f * u(rng);
    for (int k = 0; k < w + h; ++k) {
      const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
      if (ix >= 0 && ix < w && iy >= 0 && iy < h) r(ix, iy) = dark;
      fx += std::cos(ang);
      fy += std::sin(ang);
    }
  }
  for (auto& v : r.data()) v = std::round(v * 255.0f) / 255.0f;
  return r;
}

inline BinaryMask random_mask(std::mt19937& rng, int w, int h, double p_one) {
  std::bernoulli_distribution b(p_one);
  BinaryMask m(w, h);
  for (auto& v : m.data()) v = b(rng) ? 1 : 0;
  return m;
}

/// Histogram with random occupancy: a random number of occupied bins, each
/// with a random count; sometimes very sparse so ties from empty bins occur.
inline weakseg::Histogram256 random_histogram(std::mt19937& rng) {
  weakseg::Histogram256 h;
  std::uniform_int_distribution<int> bins(1, 256);
  std::uniform_int_distribution<int> pick(0, 255);
  std::uniform_int_distribution<int> count(1, 1000);
  const int occupied = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? bins(rng) % 6 + 1 : bins(rng);
  for (int i = 0; i < occupied; ++i) {
    const int c = count(rng);
    h.counts[pick(rng)] += c;
    h.total += c;
  }
  return h;
}

}  // namespace oracle
