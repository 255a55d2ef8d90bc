#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "weakseg/error.hpp"

namespace weakseg {

struct PatchOrigin {
  int x = 0;
  int y = 0;
  bool operator==(const PatchOrigin&) const = default;
};

/// Overlapping square patch footprints over a width x height image.
/// Origins run row-major over multiples of the stride; the last row/column
/// reaches the right/bottom edge and may extend past it (read through
/// mirror padding).
class PatchGrid {
 public:
  PatchGrid() = default;
  PatchGrid(int image_width, int image_height, int patch_size, int stride);

  int image_width() const noexcept { return image_width_; }
  int image_height() const noexcept { return image_height_; }
  int patch_size() const noexcept { return patch_size_; }
  int stride() const noexcept { return stride_; }
  int cols() const noexcept { return cols_; }
  int rows() const noexcept { return rows_; }
  std::size_t count() const noexcept { return static_cast<std::size_t>(cols_) * rows_; }

  PatchOrigin origin(int col, int row) const noexcept { return {col * stride_, row * stride_}; }
  PatchOrigin origin(std::size_t i) const noexcept {
    return origin(static_cast<int>(i % cols_), static_cast<int>(i / cols_));
  }
  std::vector<PatchOrigin> origins() const;

  /// Range [first, last] of grid columns whose footprint contains pixel x.
  std::pair<int, int> covering_cols(int x) const noexcept { return covering(x, cols_); }
  std::pair<int, int> covering_rows(int y) const noexcept { return covering(y, rows_); }

  bool operator==(const PatchGrid&) const = default;

 private:
  std::pair<int, int> covering(int p, int n) const noexcept {
    // origin o covers p iff o <= p < o + patch
    int last = p / stride_;
    int first = p - patch_size_ + 1 <= 0 ? 0 : (p - patch_size_ + stride_) / stride_;
    if (last > n - 1) last = n - 1;
    return {first, last};
  }

  static int axis_count(int dim, int patch, int stride) {
    if (dim <= patch) return 1;
    // smallest multiple of stride >= dim - patch, plus the origin at 0
    return (dim - patch + stride - 1) / stride + 1;
  }

  int image_width_ = 0;
  int image_height_ = 0;
  int patch_size_ = 0;
  int stride_ = 0;
  int cols_ = 0;
  int rows_ = 0;
};

inline PatchGrid::PatchGrid(int image_width, int image_height, int patch_size, int stride)
    : image_width_(image_width), image_height_(image_height), patch_size_(patch_size), stride_(stride) {
  if (image_width <= 0 || image_height <= 0) throw Error(ErrorKind::Shape, "patch grid over empty image");
  if (patch_size < 1) throw Error(ErrorKind::Parameter, "patch size must be >= 1");
  if (stride < 1 || stride > patch_size) throw Error(ErrorKind::Parameter, "stride must be in [1, patch size]");
  cols_ = axis_count(image_width, patch_size, stride);
  rows_ = axis_count(image_height, patch_size, stride);
}

inline std::vector<PatchOrigin> PatchGrid::origins() const {
  std::vector<PatchOrigin> out;
  out.reserve(count());
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out.push_back(origin(c, r));
  return out;
}

inline PatchGrid make_patch_grid(int width, int height, int patch_size, int stride) {
  return PatchGrid(width, height, patch_size, stride);
}

}  // namespace weakseg
