#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "weakseg/error.hpp"

namespace weakseg {

/// Dense single-channel image stored row-major. The tag keeps rasters,
/// confidence maps and masks from being mixed up by accident; use retag()
/// when a conversion is intended.
template <typename T, typename Tag>
class Image {
 public:
  using value_type = T;
  using tag_type = Tag;

  Image() = default;

  Image(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw Error(ErrorKind::Shape, "negative image dimension");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Image(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0) throw Error(ErrorKind::Shape, "negative image dimension");
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
      throw Error(ErrorKind::Shape, "data length does not match width x height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct RasterTag {};
struct ScoreTag {};
struct MaskTag {};

/// Intensities in [0,1].
using Raster = Image<float, RasterTag>;
/// Per-pixel crack confidence in [0,1].
using ScoreMap = Image<float, ScoreTag>;
/// Per-pixel {0,1}.
using BinaryMask = Image<std::uint8_t, MaskTag>;

template <typename To, typename From>
To retag(const From& src) {
  std::vector<typename To::value_type> data(src.size());
  auto in = src.data();
  std::transform(in.begin(), in.end(), data.begin(),
                 [](auto v) { return static_cast<typename To::value_type>(v); });
  return To(src.width(), src.height(), std::move(data));
}

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error(ErrorKind::Shape, std::string(what) + ": " + std::to_string(a.width()) + "x" +
                                      std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                                      "x" + std::to_string(b.height()));
}

/// Throws a data error unless every value is finite and within [0,1].
template <typename Tag>
void require_unit_range(const Image<float, Tag>& img, const char* what) {
  for (float v : img.data())
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
      throw Error(ErrorKind::Data, std::string(what) + ": value outside [0,1] or non-finite");
}

template <typename Tag>
void require_finite(const Image<float, Tag>& img, const char* what) {
  for (float v : img.data())
    if (!std::isfinite(v)) throw Error(ErrorKind::Data, std::string(what) + ": non-finite value");
}

/// Pixel >= 0.5 becomes 1.
template <typename Tag>
BinaryMask binarize(const Image<float, Tag>& img, float cut = 0.5f) {
  BinaryMask out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i] >= cut ? 1 : 0;
  return out;
}

/// Interleaved multi-channel image with channels in [0,1].
struct ColorImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> data;

  float at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

/// BT.601 luma.
inline Raster to_grayscale(const ColorImage& rgb) {
  if (rgb.channels != 3) throw Error(ErrorKind::Shape, "to_grayscale expects 3 channels");
  if (rgb.data.size() != static_cast<std::size_t>(rgb.width) * rgb.height * 3)
    throw Error(ErrorKind::Shape, "color data length mismatch");
  Raster out(rgb.width, rgb.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const float* px = &rgb.data[i * 3];
    double y = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
    out[i] = static_cast<float>(std::clamp(y, 0.0, 1.0));
  }
  return out;
}

/// Gray images pass through, RGB is converted with to_grayscale().
inline Raster as_grayscale(const ColorImage& img) {
  if (img.channels == 1) return Raster(img.width, img.height, img.data);
  return to_grayscale(img);
}

inline ColorImage to_color(const Raster& r) {
  return ColorImage{r.width(), r.height(), 1, std::vector<float>(r.data().begin(), r.data().end())};
}

/// Reflect-101 index folding for any integer i; repeats the reflection when
/// i lies more than one image length outside [0, n).
constexpr int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Border extension that reflects across the edge without duplicating the
/// edge pixel. Every margin must be smaller than the matching dimension.
template <typename T, typename Tag>
Image<T, Tag> mirror_pad(const Image<T, Tag>& r, int left, int right, int top, int bottom) {
  if (left < 0 || right < 0 || top < 0 || bottom < 0)
    throw Error(ErrorKind::Padding, "negative margin");
  if ((left > 0 || right > 0) && (left >= r.width() || right >= r.width()))
    throw Error(ErrorKind::Padding, "horizontal margin must be smaller than the width");
  if ((top > 0 || bottom > 0) && (top >= r.height() || bottom >= r.height()))
    throw Error(ErrorKind::Padding, "vertical margin must be smaller than the height");
  Image<T, Tag> out(r.width() + left + right, r.height() + top + bottom);
  for (int y = 0; y < out.height(); ++y) {
    const int sy = reflect101(y - top, r.height());
    for (int x = 0; x < out.width(); ++x) out(x, y) = r(reflect101(x - left, r.width()), sy);
  }
  return out;
}

template <typename T, typename Tag>
Image<T, Tag> crop(const Image<T, Tag>& r, int x0, int y0, int width, int height) {
  if (x0 < 0 || y0 < 0 || width < 0 || height < 0 || x0 + width > r.width() || y0 + height > r.height())
    throw Error(ErrorKind::Shape, "crop window outside image");
  Image<T, Tag> out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) out(x, y) = r(x0 + x, y0 + y);
  return out;
}

/// Square window read through reflect-101 folding; the window may extend
/// past the image on any side.
template <typename T, typename Tag>
Image<T, Tag> extract_patch(const Image<T, Tag>& r, int x0, int y0, int size) {
  Image<T, Tag> out(size, size);
  for (int y = 0; y < size; ++y) {
    const int sy = reflect101(y0 + y, r.height());
    for (int x = 0; x < size; ++x) out(x, y) = r(reflect101(x0 + x, r.width()), sy);
  }
  return out;
}

}  // namespace weakseg
