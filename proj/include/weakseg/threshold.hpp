#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "weakseg/image.hpp"
#include "weakseg/otsu.hpp"
#include "weakseg/parallel.hpp"
#include "weakseg/patch_grid.hpp"

namespace weakseg {

enum class OtsuMode { TwoClass, ThreeClass };

/// Crack threshold bin of a histogram: k1 of the three-class split, or the
/// single two-class threshold.
inline int crack_threshold(const Histogram256& h, OtsuMode mode) {
  return mode == OtsuMode::ThreeClass ? otsu3(h).k1 : otsu2(h);
}

/// Whole-image Otsu baseline: pixels whose bin is <= the threshold are 1.
/// A single-level image yields an empty mask.
inline BinaryMask global_otsu_segment(const Raster& r, OtsuMode mode) {
  const Histogram256 h = Histogram256::of(r);
  BinaryMask out(r.width(), r.height());
  if (h.total == 0 || h.single_level()) return out;
  const int k = crack_threshold(h, mode);
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = intensity_bin(r[i]) <= k ? 1 : 0;
  return out;
}

namespace detail {

// Window mean and population standard deviation for every pixel, borders
// folded with reflect-101. Uses a summed-area table over the padded raster.
struct WindowStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

inline WindowStats window_stats(const Raster& r, int window) {
  const int half = window / 2;
  const int w = r.width();
  const int h = r.height();
  const int pw = w + 2 * half;
  const int ph = h + 2 * half;
  std::vector<double> s1(static_cast<std::size_t>(pw + 1) * (ph + 1), 0.0);
  std::vector<double> s2(s1.size(), 0.0);
  auto at = [pw](int x, int y) { return static_cast<std::size_t>(y) * (pw + 1) + x; };
  for (int y = 0; y < ph; ++y) {
    const int sy = reflect101(y - half, h);
    double row1 = 0.0, row2 = 0.0;
    for (int x = 0; x < pw; ++x) {
      const double v = r(reflect101(x - half, w), sy);
      row1 += v;
      row2 += v * v;
      s1[at(x + 1, y + 1)] = s1[at(x + 1, y)] + row1;
      s2[at(x + 1, y + 1)] = s2[at(x + 1, y)] + row2;
    }
  }
  const double n = static_cast<double>(window) * window;
  WindowStats st{std::vector<double>(r.size()), std::vector<double>(r.size())};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      auto box = [&](const std::vector<double>& s) {
        return s[at(x + window, y + window)] - s[at(x, y + window)] - s[at(x + window, y)] + s[at(x, y)];
      };
      const double mean = box(s1) / n;
      const double var = std::max(0.0, box(s2) / n - mean * mean);
      const auto i = static_cast<std::size_t>(y) * w + x;
      st.mean[i] = mean;
      st.stddev[i] = std::sqrt(var);
    }
  return st;
}

inline void require_odd_window(int window) {
  if (window < 3 || window % 2 == 0) throw Error(ErrorKind::Parameter, "window must be odd and >= 3");
}

}  // namespace detail

/// Niblack: T = mean + k * stddev over the window; darker pixels are 1.
inline BinaryMask niblack(const Raster& r, int window = 33, double k = -0.2) {
  detail::require_odd_window(window);
  const auto st = detail::window_stats(r, window);
  BinaryMask out(r.width(), r.height());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] < st.mean[i] + k * st.stddev[i] ? 1 : 0;
  return out;
}

/// Sauvola: T = mean * (1 + k * (stddev / R - 1)); darker pixels are 1.
inline BinaryMask sauvola(const Raster& r, int window = 33, double k = 0.5, double dynamic_range = 0.5) {
  detail::require_odd_window(window);
  if (!(dynamic_range > 0.0)) throw Error(ErrorKind::Parameter, "Sauvola R must be positive");
  const auto st = detail::window_stats(r, window);
  BinaryMask out(r.width(), r.height());
  for (std::size_t i = 0; i < r.size(); ++i)
    out[i] = r[i] < st.mean[i] * (1.0 + k * (st.stddev[i] / dynamic_range - 1.0)) ? 1 : 0;
  return out;
}

/// Per-patch threshold used for voting; -1 marks a single-level patch, which
/// votes 0 everywhere.
inline int patch_vote_threshold(const Raster& r, PatchOrigin o, int patch_size, OtsuMode mode) {
  Histogram256 h;
  for (int y = 0; y < patch_size; ++y) {
    const int sy = reflect101(o.y + y, r.height());
    for (int x = 0; x < patch_size; ++x) h.add(r(reflect101(o.x + x, r.width()), sy));
  }
  if (h.single_level()) return -1;
  return crack_threshold(h, mode);
}

/// Local Otsu thresholding with unanimous fusion. Every grid patch (read
/// through mirror padding) is thresholded from its own histogram and votes 1
/// for its in-image pixels at or below the threshold. A pixel is kept only
/// if every patch covering it voted 1.
inline BinaryMask patch_threshold_segment(const Raster& r, int patch_size = 32, int stride = 8,
                                          OtsuMode mode = OtsuMode::ThreeClass) {
  const PatchGrid grid(r.width(), r.height(), patch_size, stride);
  std::vector<int> thresholds(grid.count());
  parallel_for(grid.count(), [&](std::size_t i) {
    thresholds[i] = patch_vote_threshold(r, grid.origin(i), patch_size, mode);
  });

  // Each pixel looks up its covering patches, so rows can be filled
  // independently.
  const int w = r.width();
  BinaryMask out(w, r.height());
  parallel_for(static_cast<std::size_t>(r.height()), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    const auto [r0, r1] = grid.covering_rows(y);
    for (int x = 0; x < w; ++x) {
      const int bin = intensity_bin(r(x, y));
      const auto [c0, c1] = grid.covering_cols(x);
      bool keep = true;
      for (int gr = r0; gr <= r1 && keep; ++gr)
        for (int gc = c0; gc <= c1 && keep; ++gc)
          keep = bin <= thresholds[static_cast<std::size_t>(gr) * grid.cols() + gc];
      out(x, y) = keep ? 1 : 0;
    }
  });
  return out;
}

}  // namespace weakseg
