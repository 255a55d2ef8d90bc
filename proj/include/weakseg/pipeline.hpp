#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakseg/bilateral.hpp"
#include "weakseg/classifier.hpp"
#include "weakseg/image.hpp"
#include "weakseg/morphology.hpp"
#include "weakseg/resample.hpp"
#include "weakseg/threshold.hpp"

namespace weakseg {

/// Every tunable of the segmentation method. Defaults reproduce the
/// published settings.
struct PipelineConfig {
  int loc_patch = 32;
  int loc_stride = 16;
  int thr_patch = 32;
  int thr_stride = 8;
  double bilateral_sigma_s = 120.0;
  double bilateral_sigma_r = 120.0;  // on the 0-255 intensity scale
  int bilateral_d = 2;
  StructuringElement erosion{3, 3, 4};
  StructuringElement closing{3, 3, 1};
  double cut = 0.5;
  StructuringElement gold_dilation{16, 16, 1};
  OtsuMode otsu_mode = OtsuMode::ThreeClass;
  bool enable_bilateral = true;
  bool enable_closing = true;

  BilateralParams bilateral() const {
    return BilateralParams::from_8bit(bilateral_sigma_s, bilateral_sigma_r, bilateral_d);
  }

  void validate() const {
    if (loc_patch < 1 || thr_patch < 1) throw Error(ErrorKind::Config, "patch sizes must be >= 1");
    if (loc_stride < 1 || loc_stride > loc_patch) throw Error(ErrorKind::Config, "loc_stride must be in [1, loc_patch]");
    if (thr_stride < 1 || thr_stride > thr_patch) throw Error(ErrorKind::Config, "thr_stride must be in [1, thr_patch]");
    if (!(cut >= 0.0 && cut <= 1.0)) throw Error(ErrorKind::Config, "cut must be in [0,1]");
    try {
      bilateral().validate();
      erosion.validate();
      closing.validate();
      gold_dilation.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, e.what());
    }
  }
};

inline void to_json(nlohmann::json& j, const StructuringElement& se) {
  j = nlohmann::json{{"width", se.width}, {"height", se.height}, {"iterations", se.iterations}};
}

inline void from_json(const nlohmann::json& j, StructuringElement& se) {
  se.width = j.value("width", se.width);
  se.height = j.value("height", se.height);
  se.iterations = j.value("iterations", se.iterations);
}

inline void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{{"loc_patch", c.loc_patch},
                     {"loc_stride", c.loc_stride},
                     {"thr_patch", c.thr_patch},
                     {"thr_stride", c.thr_stride},
                     {"bilateral_sigma_s", c.bilateral_sigma_s},
                     {"bilateral_sigma_r", c.bilateral_sigma_r},
                     {"bilateral_d", c.bilateral_d},
                     {"erosion", c.erosion},
                     {"closing", c.closing},
                     {"cut", c.cut},
                     {"gold_dilation", c.gold_dilation},
                     {"otsu_mode", c.otsu_mode == OtsuMode::ThreeClass ? "three" : "two"},
                     {"enable_bilateral", c.enable_bilateral},
                     {"enable_closing", c.enable_closing}};
}

inline OtsuMode parse_otsu_mode(const std::string& s) {
  if (s == "three" || s == "three-class" || s == "3") return OtsuMode::ThreeClass;
  if (s == "two" || s == "two-class" || s == "2") return OtsuMode::TwoClass;
  throw Error(ErrorKind::Config, "otsu_mode must be 'two' or 'three', got '" + s + "'");
}

/// Keys absent from the JSON keep their current values; unknown keys are
/// rejected.
inline void from_json(const nlohmann::json& j, PipelineConfig& c) {
  static const std::vector<std::string> known{
      "loc_patch",   "loc_stride",    "thr_patch", "thr_stride",    "bilateral_sigma_s", "bilateral_sigma_r",
      "bilateral_d", "erosion",       "closing",   "cut",           "gold_dilation",     "otsu_mode",
      "enable_bilateral", "enable_closing"};
  if (!j.is_object()) throw Error(ErrorKind::Config, "pipeline config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
  try {
    c.loc_patch = j.value("loc_patch", c.loc_patch);
    c.loc_stride = j.value("loc_stride", c.loc_stride);
    c.thr_patch = j.value("thr_patch", c.thr_patch);
    c.thr_stride = j.value("thr_stride", c.thr_stride);
    c.bilateral_sigma_s = j.value("bilateral_sigma_s", c.bilateral_sigma_s);
    c.bilateral_sigma_r = j.value("bilateral_sigma_r", c.bilateral_sigma_r);
    c.bilateral_d = j.value("bilateral_d", c.bilateral_d);
    if (j.contains("erosion")) from_json(j.at("erosion"), c.erosion);
    if (j.contains("closing")) from_json(j.at("closing"), c.closing);
    c.cut = j.value("cut", c.cut);
    if (j.contains("gold_dilation")) from_json(j.at("gold_dilation"), c.gold_dilation);
    if (j.contains("otsu_mode")) c.otsu_mode = parse_otsu_mode(j.at("otsu_mode").get<std::string>());
    c.enable_bilateral = j.value("enable_bilateral", c.enable_bilateral);
    c.enable_closing = j.value("enable_closing", c.enable_closing);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, e.what());
  }
}

/// Stride-resolution map: each stride x stride block holds the mean score of
/// every patch whose footprint intersects it.
inline ScoreMap localisation_blocks(const PatchScoreGrid& g) {
  g.validate();
  const int s = g.stride;
  const int bw = (g.src_w + s - 1) / s;
  const int bh = (g.src_h + s - 1) / s;
  std::vector<double> sum(static_cast<std::size_t>(bw) * bh, 0.0);
  std::vector<int> hits(sum.size(), 0);
  const PatchGrid grid = g.grid();
  for (int row = 0; row < grid.rows(); ++row)
    for (int col = 0; col < grid.cols(); ++col) {
      const PatchOrigin o = grid.origin(col, row);
      const int bx1 = std::min(bw - 1, (o.x + g.patch_size - 1) / s);
      const int by1 = std::min(bh - 1, (o.y + g.patch_size - 1) / s);
      for (int by = o.y / s; by <= by1; ++by)
        for (int bx = o.x / s; bx <= bx1; ++bx) {
          const auto i = static_cast<std::size_t>(by) * bw + bx;
          sum[i] += g.at(col, row);
          ++hits[i];
        }
    }
  ScoreMap blocks(bw, bh);
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] = static_cast<float>(sum[i] / hits[i]);
  return blocks;
}

/// Patch-classification localisation map: the block map Lanczos-upsampled by
/// the stride and cropped to the image size.
inline ScoreMap localisation_from_scores(const PatchScoreGrid& g, int out_w, int out_h) {
  if (g.src_w != out_w || g.src_h != out_h)
    throw Error(ErrorKind::Config, "score grid was made for a " + std::to_string(g.src_w) + "x" +
                                       std::to_string(g.src_h) + " image, not " + std::to_string(out_w) + "x" +
                                       std::to_string(out_h));
  const ScoreMap blocks = localisation_blocks(g);
  const ScoreMap up = lanczos_resize(blocks, blocks.width() * g.stride, blocks.height() * g.stride);
  return crop(up, 0, 0, out_w, out_h);
}

/// Averages the two localisation maps, zeroes values at or below the cut and
/// erodes what remains.
inline ScoreMap merge_localisation(const ScoreMap& patch_map, const ScoreMap& cam, const PipelineConfig& cfg) {
  require_same_shape(patch_map, cam, "merge_localisation");
  ScoreMap m(patch_map.width(), patch_map.height());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const float v = 0.5f * (patch_map[i] + cam[i]);
    m[i] = v > cfg.cut ? v : 0.0f;
  }
  return erode(m, cfg.erosion);
}

/// Multiplies localisation and thresholded segmentation, then optionally
/// smooths and closes the product.
inline ScoreMap fuse(const ScoreMap& loc, const BinaryMask& seg, const PipelineConfig& cfg) {
  require_same_shape(loc, seg, "fuse");
  ScoreMap out(loc.width(), loc.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = seg[i] ? loc[i] : 0.0f;
  if (cfg.enable_bilateral) out = bilateral_filter(out, cfg.bilateral());
  if (cfg.enable_closing) out = close(out, cfg.closing);
  for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

/// Gray input for thresholding: bilateral-filtered unless disabled.
inline Raster threshold_input(const Raster& gray, const PipelineConfig& cfg) {
  return cfg.enable_bilateral ? bilateral_filter(gray, cfg.bilateral()) : gray;
}

inline BinaryMask threshold_segment(const Raster& gray, const PipelineConfig& cfg) {
  return patch_threshold_segment(threshold_input(gray, cfg), cfg.thr_patch, cfg.thr_stride, cfg.otsu_mode);
}

/// Intermediate and final maps of one segmentation run.
struct SegmentResult {
  ScoreMap patch_map;     // patch classification localisation
  ScoreMap localisation;  // merged, cut and eroded
  BinaryMask threshold;   // unanimous local Otsu segmentation
  ScoreMap confidence;    // final output
};

inline SegmentResult segment_detailed(const ColorImage& image, const PatchScorer& backend, const ScoreMap& cam,
                                      const PipelineConfig& cfg) {
  cfg.validate();
  const Raster gray = as_grayscale(image);
  require_same_shape(gray, cam, "segment: image vs CAM");
  SegmentResult r;
  const PatchScoreGrid scores = score_patches(backend, image, cfg.loc_patch, cfg.loc_stride);
  r.patch_map = localisation_from_scores(scores, gray.width(), gray.height());
  r.localisation = merge_localisation(r.patch_map, cam, cfg);
  r.threshold = threshold_segment(gray, cfg);
  r.confidence = fuse(r.localisation, r.threshold, cfg);
  return r;
}

/// Weakly-supervised segmentation of one image into a confidence map.
inline ScoreMap segment(const ColorImage& image, const PatchScorer& backend, const ScoreMap& cam,
                        const PipelineConfig& cfg) {
  return segment_detailed(image, backend, cam, cfg).confidence;
}

/// Classifier-free upper bound: the ground truth, widened by dilation,
/// stands in for the merged localisation map before the erosion step.
inline ScoreMap gold_standard_localisation(const BinaryMask& gt, const PipelineConfig& cfg) {
  ScoreMap widened = dilate(retag<ScoreMap>(gt), cfg.gold_dilation);
  return erode(widened, cfg.erosion);
}

inline SegmentResult gold_standard_segment(const ColorImage& image, const BinaryMask& gt, const PipelineConfig& cfg) {
  cfg.validate();
  const Raster gray = as_grayscale(image);
  require_same_shape(gray, gt, "gold standard: image vs ground truth");
  SegmentResult r;
  r.localisation = gold_standard_localisation(gt, cfg);
  r.threshold = threshold_segment(gray, cfg);
  r.confidence = fuse(r.localisation, r.threshold, cfg);
  return r;
}

}  // namespace weakseg
