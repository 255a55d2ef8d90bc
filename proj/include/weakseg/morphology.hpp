#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "weakseg/image.hpp"
#include "weakseg/parallel.hpp"

namespace weakseg {

/// All-ones rectangle anchored at (width/2, height/2), applied `iterations`
/// times.
struct StructuringElement {
  int width = 3;
  int height = 3;
  int iterations = 1;

  void validate() const {
    if (width < 1 || height < 1) throw Error(ErrorKind::Parameter, "structuring element must be at least 1x1");
    if (iterations < 1) throw Error(ErrorKind::Parameter, "iterations must be >= 1");
  }
};

namespace detail {

// One rank-filter pass along a single axis; the window covers offsets
// [-anchor, size - 1 - anchor]. A rectangle min/max separates into a
// horizontal and a vertical pass.
template <typename T, typename Tag, typename Pick>
Image<T, Tag> rank_pass(const Image<T, Tag>& src, int size, int anchor, bool horizontal, Pick pick) {
  const int w = src.width();
  const int h = src.height();
  Image<T, Tag> out(w, h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      T best{};
      for (int k = 0; k < size; ++k) {
        const int off = k - anchor;
        const T v = horizontal ? src(reflect101(x + off, w), y) : src(x, reflect101(y + off, h));
        best = k == 0 ? v : pick(best, v);
      }
      out(x, y) = best;
    }
  });
  return out;
}

// The anchor sits at size/2; the reflected element (point-mirrored window,
// only different for even sizes) anchors at size - 1 - size/2.
template <typename T, typename Tag, typename Pick>
Image<T, Tag> rank_filter(Image<T, Tag> img, const StructuringElement& se, Pick pick, bool reflected = false) {
  se.validate();
  if (img.empty()) return img;
  auto anchor = [reflected](int size) { return reflected ? size - 1 - size / 2 : size / 2; };
  for (int i = 0; i < se.iterations; ++i) {
    if (se.width > 1) img = rank_pass(img, se.width, anchor(se.width), true, pick);
    if (se.height > 1) img = rank_pass(img, se.height, anchor(se.height), false, pick);
  }
  return img;
}

template <typename T>
T pick_min(T a, T b) { return std::min(a, b); }
template <typename T>
T pick_max(T a, T b) { return std::max(a, b); }

}  // namespace detail

/// Grayscale erosion (window minimum). On {0,1} data this is binary erosion.
template <typename T, typename Tag>
Image<T, Tag> erode(const Image<T, Tag>& img, const StructuringElement& se) {
  return detail::rank_filter(img, se, detail::pick_min<T>);
}

/// Grayscale dilation (window maximum).
template <typename T, typename Tag>
Image<T, Tag> dilate(const Image<T, Tag>& img, const StructuringElement& se) {
  return detail::rank_filter(img, se, detail::pick_max<T>);
}

/// Dilation followed by erosion with the reflected element, once per
/// iteration. For odd sizes the reflected element is the element itself.
template <typename T, typename Tag>
Image<T, Tag> close(const Image<T, Tag>& img, const StructuringElement& se) {
  se.validate();
  const StructuringElement once{se.width, se.height, 1};
  Image<T, Tag> out = img;
  for (int i = 0; i < se.iterations; ++i)
    out = detail::rank_filter(dilate(out, once), once, detail::pick_min<T>, true);
  return out;
}

}  // namespace weakseg
