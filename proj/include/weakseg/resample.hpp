#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "weakseg/image.hpp"
#include "weakseg/parallel.hpp"

namespace weakseg {

inline constexpr int kLanczosOrder = 3;

inline double lanczos_kernel(double x, int a = kLanczosOrder) {
  x = std::abs(x);
  if (x < 1e-12) return 1.0;
  if (x >= a) return 0.0;
  const double px = std::numbers::pi * x;
  return a * std::sin(px) * std::sin(px / a) / (px * px);
}

namespace detail {

struct Taps {
  int first = 0;               // first source index before clamping
  std::vector<double> weights;  // normalized
};

// Pixel centers are aligned: output x maps to source (x + 0.5) * in/out - 0.5.
// When shrinking, the kernel is stretched by the scale factor.
inline std::vector<Taps> lanczos_taps(int in, int out) {
  const double scale = static_cast<double>(in) / out;
  const double stretch = std::max(1.0, scale);
  const double support = kLanczosOrder * stretch;
  std::vector<Taps> taps(static_cast<std::size_t>(out));
  for (int o = 0; o < out; ++o) {
    const double center = (o + 0.5) * scale - 0.5;
    const int first = static_cast<int>(std::floor(center - support)) + 1;
    const int last = static_cast<int>(std::floor(center + support));
    Taps& t = taps[static_cast<std::size_t>(o)];
    t.first = first;
    double sum = 0.0;
    for (int j = first; j <= last; ++j) {
      const double w = lanczos_kernel((j - center) / stretch);
      t.weights.push_back(w);
      sum += w;
    }
    for (double& w : t.weights) w /= sum;
  }
  return taps;
}

}  // namespace detail

/// Separable Lanczos-3 resampling. Source coordinates outside the image are
/// clamped to the nearest edge; the result is clamped to [0,1].
template <typename Tag>
Image<float, Tag> lanczos_resize(const Image<float, Tag>& src, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw Error(ErrorKind::Shape, "resize target must be at least 1x1");
  if (src.empty()) throw Error(ErrorKind::Shape, "resize of an empty image");
  const int in_w = src.width();
  const int in_h = src.height();
  const auto xtaps = detail::lanczos_taps(in_w, out_w);
  const auto ytaps = detail::lanczos_taps(in_h, out_h);

  std::vector<double> horiz(static_cast<std::size_t>(out_w) * in_h);
  parallel_for(static_cast<std::size_t>(in_h), [&](std::size_t y) {
    const auto row = src.row(static_cast<int>(y));
    for (int x = 0; x < out_w; ++x) {
      const auto& t = xtaps[static_cast<std::size_t>(x)];
      double acc = 0.0;
      for (std::size_t k = 0; k < t.weights.size(); ++k)
        acc += t.weights[k] * row[static_cast<std::size_t>(std::clamp(t.first + static_cast<int>(k), 0, in_w - 1))];
      horiz[y * out_w + x] = acc;
    }
  });

  Image<float, Tag> out(out_w, out_h);
  parallel_for(static_cast<std::size_t>(out_h), [&](std::size_t y) {
    const auto& t = ytaps[y];
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < t.weights.size(); ++k) {
        const int sy = std::clamp(t.first + static_cast<int>(k), 0, in_h - 1);
        acc += t.weights[k] * horiz[static_cast<std::size_t>(sy) * out_w + x];
      }
      out(x, static_cast<int>(y)) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
    }
  });
  return out;
}

}  // namespace weakseg
