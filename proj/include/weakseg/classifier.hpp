#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "weakseg/binary_io.hpp"
#include "weakseg/image.hpp"
#include "weakseg/patch_grid.hpp"
#include "weakseg/resample.hpp"
#include "weakseg/scoremap_io.hpp"

namespace weakseg {

/// One crack probability per origin of the patch grid over a src_w x src_h
/// image, row-major in grid order.
struct PatchScoreGrid {
  int grid_w = 0;
  int grid_h = 0;
  int patch_size = 0;
  int stride = 0;
  int src_w = 0;
  int src_h = 0;
  std::vector<float> scores;

  float at(int col, int row) const { return scores[static_cast<std::size_t>(row) * grid_w + col]; }
  PatchGrid grid() const { return PatchGrid(src_w, src_h, patch_size, stride); }

  /// Throws a config error if the grid shape disagrees with the patch grid
  /// of its source dimensions, a data error on out-of-range scores.
  void validate() const {
    const PatchGrid g = grid();
    if (g.cols() != grid_w || g.rows() != grid_h)
      throw Error(ErrorKind::Config, "score grid is " + std::to_string(grid_w) + "x" + std::to_string(grid_h) +
                                         " but the patch grid is " + std::to_string(g.cols()) + "x" +
                                         std::to_string(g.rows()));
    if (scores.size() != g.count()) throw Error(ErrorKind::Config, "score count does not match grid size");
    for (float s : scores)
      if (!std::isfinite(s) || s < 0.0f || s > 1.0f) throw Error(ErrorKind::Data, "patch score outside [0,1]");
  }

  bool operator==(const PatchScoreGrid&) const = default;
};

// .psg layout: "PSG1", u32 grid_w, grid_h, patch_size, stride, src_w, src_h,
// then grid_w*grid_h f32, all little-endian.
inline constexpr std::string_view kPsgMagic = "PSG1";

inline Bytes encode_psg(const PatchScoreGrid& g) {
  ByteWriter w;
  w.raw(kPsgMagic);
  for (int v : {g.grid_w, g.grid_h, g.patch_size, g.stride, g.src_w, g.src_h}) w.u32(static_cast<std::uint32_t>(v));
  for (float s : g.scores) w.f32(s);
  return w.bytes();
}

inline PatchScoreGrid decode_psg(const Bytes& bytes) {
  ByteReader r(bytes);
  if (r.raw(4) != kPsgMagic) throw Error(ErrorKind::Format, "bad .psg magic");
  PatchScoreGrid g;
  for (int* field : {&g.grid_w, &g.grid_h, &g.patch_size, &g.stride, &g.src_w, &g.src_h}) {
    const std::uint32_t v = r.u32();
    if (v > (1u << 30)) throw Error(ErrorKind::Format, ".psg header field out of range");
    *field = static_cast<int>(v);
  }
  const std::uint64_t n = static_cast<std::uint64_t>(g.grid_w) * g.grid_h;
  if (r.remaining() != n * 4) throw Error(ErrorKind::Format, "payload size does not match .psg header");
  g.scores.resize(static_cast<std::size_t>(n));
  for (float& s : g.scores) s = r.f32();
  g.validate();
  return g;
}

inline void save_psg(const PatchScoreGrid& g, const std::filesystem::path& path) {
  g.validate();
  write_file_atomic(path, encode_psg(g));
}

inline PatchScoreGrid load_psg(const std::filesystem::path& path) { return decode_psg(read_file(path)); }

/// Source of per-patch crack probabilities. Implementations are immutable
/// after construction and may be called concurrently.
class PatchScorer {
 public:
  virtual ~PatchScorer() = default;
  virtual PatchScoreGrid score_patches(const ColorImage& image, int patch_size, int stride) const = 0;
};

inline PatchScoreGrid score_patches(const PatchScorer& backend, const ColorImage& image, int patch_size = 32,
                                    int stride = 16) {
  return backend.score_patches(image, patch_size, stride);
}

inline PatchScoreGrid score_patches(const PatchScorer& backend, const Raster& image, int patch_size = 32,
                                    int stride = 16) {
  return backend.score_patches(to_color(image), patch_size, stride);
}

/// Serves a precomputed grid after checking it was made for the requested
/// image size and grid parameters.
class FileScorer final : public PatchScorer {
 public:
  explicit FileScorer(PatchScoreGrid grid) : grid_(std::move(grid)) { grid_.validate(); }
  explicit FileScorer(const std::filesystem::path& path) : FileScorer(load_psg(path)) {}

  PatchScoreGrid score_patches(const ColorImage& image, int patch_size, int stride) const override {
    if (grid_.src_w != image.width || grid_.src_h != image.height || grid_.patch_size != patch_size ||
        grid_.stride != stride)
      throw Error(ErrorKind::Config,
                  "stored scores were computed for " + std::to_string(grid_.src_w) + "x" +
                      std::to_string(grid_.src_h) + " (patch " + std::to_string(grid_.patch_size) + ", stride " +
                      std::to_string(grid_.stride) + "), requested " + std::to_string(image.width) + "x" +
                      std::to_string(image.height) + " (patch " + std::to_string(patch_size) + ", stride " +
                      std::to_string(stride) + ")");
    return grid_;
  }

 private:
  PatchScoreGrid grid_;
};

/// Class activation map stored as .smap: values are clamped to [0,1] and the
/// map is Lanczos-resized when its size differs from the target.
inline ScoreMap prepare_cam(ScoreMap cam, int target_w, int target_h) {
  for (float& v : cam.data()) v = std::clamp(v, 0.0f, 1.0f);
  if (cam.width() != target_w || cam.height() != target_h) cam = lanczos_resize(cam, target_w, target_h);
  return cam;
}

inline ScoreMap load_cam(const std::filesystem::path& path, int target_w, int target_h) {
  return prepare_cam(decode_smap(read_file(path)), target_w, target_h);
}

}  // namespace weakseg
