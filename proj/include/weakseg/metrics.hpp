#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "weakseg/image.hpp"
#include "weakseg/parallel.hpp"

namespace weakseg {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  bool operator==(const ConfusionCounts&) const = default;
};

/// Prediction is positive where pred >= t.
inline ConfusionCounts confusion_at(const ScoreMap& pred, const BinaryMask& gt, double t) {
  require_same_shape(pred, gt, "confusion_at");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = static_cast<double>(pred[i]) >= t;
    const bool g = gt[i] != 0;
    c.tp += p && g;
    c.fp += p && !g;
    c.fn += !p && g;
  }
  return c;
}

inline constexpr int kCurvePoints = 101;

/// Threshold i of the curve, i = 0..100.
constexpr double curve_threshold(int i) { return i / 100.0; }

struct PRPoint {
  double t = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

using PRCurve = std::array<PRPoint, kCurvePoints>;

struct MacroF1 {
  double f1 = 0.0;
  double best_t = 0.0;
  PRCurve curve{};
};

/// Ratio with 0/0 defined as 0.
inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

namespace detail {

// Confusion counts at all 101 thresholds in one pass: each pixel is binned
// by the largest threshold it reaches, then counts are suffix-summed.
inline std::array<ConfusionCounts, kCurvePoints> curve_counts(const ScoreMap& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "macro_f1");
  std::array<std::uint64_t, kCurvePoints> pos_hits{}, neg_hits{};
  std::uint64_t total_pos = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double v = pred[i];
    const bool g = gt[i] != 0;
    total_pos += g;
    int k = static_cast<int>(std::floor(v * 100.0));
    if (k > kCurvePoints - 1) k = kCurvePoints - 1;
    while (k >= 0 && v < curve_threshold(k)) --k;
    while (k + 1 < kCurvePoints && v >= curve_threshold(k + 1)) ++k;
    if (k < 0) continue;
    (g ? pos_hits : neg_hits)[static_cast<std::size_t>(k)]++;
  }
  std::array<ConfusionCounts, kCurvePoints> out{};
  std::uint64_t tp = 0, fp = 0;
  for (int k = kCurvePoints - 1; k >= 0; --k) {
    tp += pos_hits[static_cast<std::size_t>(k)];
    fp += neg_hits[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = {tp, fp, total_pos - tp};
  }
  return out;
}

}  // namespace detail

/// Macro F1: per-threshold precision and recall are averaged over images
/// (0/0 terms count as 0), and the best harmonic mean over the 101
/// thresholds {0, 0.01, ..., 1} is reported. Ties keep the smallest t.
inline MacroF1 macro_f1(std::span<const ScoreMap> preds, std::span<const BinaryMask> gts) {
  if (preds.empty()) throw Error(ErrorKind::Usage, "macro_f1 needs at least one prediction");
  if (preds.size() != gts.size()) throw Error(ErrorKind::Usage, "prediction and ground-truth lists differ in length");
  std::vector<std::array<ConfusionCounts, kCurvePoints>> per_image(preds.size());
  parallel_for(preds.size(), [&](std::size_t i) { per_image[i] = detail::curve_counts(preds[i], gts[i]); });

  MacroF1 out;
  out.f1 = -1.0;
  const double n = static_cast<double>(preds.size());
  for (int k = 0; k < kCurvePoints; ++k) {
    double p_sum = 0.0, r_sum = 0.0;
    for (const auto& counts : per_image) {
      const auto& c = counts[static_cast<std::size_t>(k)];
      p_sum += safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
      r_sum += safe_ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    }
    PRPoint& pt = out.curve[static_cast<std::size_t>(k)];
    pt = {curve_threshold(k), p_sum / n, r_sum / n};
    const double f1 = safe_ratio(2.0 * pt.precision * pt.recall, pt.precision + pt.recall);
    if (f1 > out.f1) {
      out.f1 = f1;
      out.best_t = pt.t;
    }
  }
  return out;
}

/// F1 of the crack class with predictions score >= 0.5.
inline double classification_f1(std::span<const double> scores, std::span<const int> labels) {
  if (scores.empty()) throw Error(ErrorKind::Usage, "classification_f1 needs at least one item");
  if (scores.size() != labels.size()) throw Error(ErrorKind::Usage, "score and label lists differ in length");
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool p = scores[i] >= 0.5;
    const bool g = labels[i] != 0;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  return safe_ratio(2.0 * tp, static_cast<double>(2 * tp + fp + fn));
}

}  // namespace weakseg
