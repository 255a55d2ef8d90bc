#pragma once

#include <cmath>
#include <vector>

#include "weakseg/image.hpp"
#include "weakseg/parallel.hpp"

namespace weakseg {

/// sigma_range is expressed in the raster's own intensity units ([0,1]).
struct BilateralParams {
  double sigma_spatial = 120.0;
  double sigma_range = 120.0 / 255.0;
  int radius = 2;

  /// Parameters quoted on the 0-255 intensity scale.
  static BilateralParams from_8bit(double sigma_spatial, double sigma_range_255, int radius) {
    return {sigma_spatial, sigma_range_255 / 255.0, radius};
  }

  void validate() const {
    if (!(sigma_spatial > 0.0) || !(sigma_range > 0.0))
      throw Error(ErrorKind::Parameter, "bilateral sigmas must be positive");
    if (radius < 1) throw Error(ErrorKind::Parameter, "bilateral radius must be >= 1");
  }
};

/// Edge-preserving smoothing: each pixel becomes the average of its
/// (2r+1)^2 neighborhood weighted by a spatial Gaussian times a Gaussian on
/// the intensity difference, normalized by the weight sum. Borders read
/// through reflect-101 folding.
template <typename Tag>
Image<float, Tag> bilateral_filter(const Image<float, Tag>& src, const BilateralParams& p) {
  p.validate();
  require_finite(src, "bilateral_filter");
  const int r = p.radius;
  const int side = 2 * r + 1;
  std::vector<double> spatial(static_cast<std::size_t>(side) * side);
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      spatial[static_cast<std::size_t>((dy + r) * side + dx + r)] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * p.sigma_spatial * p.sigma_spatial));
  const double range_coeff = -1.0 / (2.0 * p.sigma_range * p.sigma_range);

  const int w = src.width();
  const int h = src.height();
  Image<float, Tag> out(w, h);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      const double center = src(x, y);
      double num = 0.0;
      double den = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const int sy = reflect101(y + dy, h);
        for (int dx = -r; dx <= r; ++dx) {
          const double v = src(reflect101(x + dx, w), sy);
          const double diff = v - center;
          const double wgt = spatial[static_cast<std::size_t>((dy + r) * side + dx + r)] *
                             std::exp(range_coeff * diff * diff);
          num += wgt * v;
          den += wgt;
        }
      }
      out(x, y) = static_cast<float>(num / den);
    }
  });
  return out;
}

}  // namespace weakseg
