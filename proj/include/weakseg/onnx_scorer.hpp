#pragma once

// Patch scoring with an ONNX classifier executed through OpenCV's dnn
// module. Only available when the build found OpenCV (WEAKSEG_WITH_ONNX).

#include <opencv2/dnn.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakseg/classifier.hpp"

namespace weakseg {

enum class OutputHead { Softmax2, Sigmoid1 };

/// Sidecar describing how patches are fed to the model and how its output
/// maps to a crack probability.
struct ModelManifest {
  int input_size = 0;
  std::string channel_order;  // "RGB", "BGR" or "GRAY"
  std::vector<double> mean;
  std::vector<double> stddev;
  OutputHead head = OutputHead::Softmax2;
  int crack_index = 1;

  int channels() const { return channel_order == "GRAY" ? 1 : 3; }

  static ModelManifest from_json(const nlohmann::json& j) {
    auto need = [&](const char* key) -> const nlohmann::json& {
      if (!j.contains(key)) throw Error(ErrorKind::Config, std::string("model manifest is missing '") + key + "'");
      return j.at(key);
    };
    ModelManifest m;
    try {
      m.input_size = need("input_size").get<int>();
      m.channel_order = need("channel_order").get<std::string>();
      const auto& norm = j.contains("normalization") ? j.at("normalization") : j;
      if (!norm.contains("mean") || !norm.contains("std"))
        throw Error(ErrorKind::Config, "model manifest is missing normalization mean/std");
      m.mean = norm.at("mean").get<std::vector<double>>();
      m.stddev = norm.at("std").get<std::vector<double>>();
      const auto head = need("output_head").get<std::string>();
      if (head == "softmax2")
        m.head = OutputHead::Softmax2;
      else if (head == "sigmoid1")
        m.head = OutputHead::Sigmoid1;
      else
        throw Error(ErrorKind::Config, "unknown output_head '" + head + "'");
      m.crack_index = j.value("crack_index", m.head == OutputHead::Softmax2 ? 1 : 0);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Config, std::string("model manifest: ") + e.what());
    }
    if (m.input_size < 1) throw Error(ErrorKind::Config, "manifest input_size must be >= 1");
    if (m.channel_order != "RGB" && m.channel_order != "BGR" && m.channel_order != "GRAY")
      throw Error(ErrorKind::Config, "channel_order must be RGB, BGR or GRAY");
    if (m.mean.size() != static_cast<std::size_t>(m.channels()) ||
        m.stddev.size() != static_cast<std::size_t>(m.channels()))
      throw Error(ErrorKind::Config, "mean/std length must equal the channel count");
    for (double s : m.stddev)
      if (!(s > 0.0)) throw Error(ErrorKind::Config, "std entries must be positive");
    if (m.head == OutputHead::Softmax2 && (m.crack_index < 0 || m.crack_index > 1))
      throw Error(ErrorKind::Config, "crack_index must be 0 or 1 for softmax2");
    return m;
  }

  static ModelManifest load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Format, path.string() + ": " + e.what());
    }
  }
};

/// Maps raw model outputs to a crack probability.
inline double crack_probability(const std::vector<float>& outputs, const ModelManifest& m) {
  if (m.head == OutputHead::Sigmoid1) {
    if (outputs.size() != 1) throw Error(ErrorKind::Backend, "sigmoid1 head expects one output");
    return 1.0 / (1.0 + std::exp(-static_cast<double>(outputs[0])));
  }
  if (outputs.size() != 2) throw Error(ErrorKind::Backend, "softmax2 head expects two outputs");
  const double a = outputs[0], b = outputs[1];
  const double hi = std::max(a, b);
  const double ea = std::exp(a - hi), eb = std::exp(b - hi);
  return (m.crack_index == 0 ? ea : eb) / (ea + eb);
}

class OnnxScorer final : public PatchScorer {
 public:
  OnnxScorer(const std::filesystem::path& model, ModelManifest manifest) : manifest_(std::move(manifest)) {
    try {
      net_ = cv::dnn::readNetFromONNX(model.string());
    } catch (const cv::Exception& e) {
      throw Error(ErrorKind::Backend, "cannot load model " + model.string() + ": " + e.what());
    }
    if (net_.empty()) throw Error(ErrorKind::Backend, "empty network in " + model.string());
    net_.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    net_.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
  }

  const ModelManifest& manifest() const noexcept { return manifest_; }

  /// NCHW float tensor for one mirror-padded patch.
  std::vector<float> patch_tensor(const ColorImage& image, PatchOrigin o, int patch_size) const {
    const int c_out = manifest_.channels();
    const int n = manifest_.input_size;
    std::vector<float> tensor(static_cast<std::size_t>(c_out) * n * n);
    for (int c = 0; c < c_out; ++c) {
      Raster plane(patch_size, patch_size);
      for (int y = 0; y < patch_size; ++y) {
        const int sy = reflect101(o.y + y, image.height);
        for (int x = 0; x < patch_size; ++x) plane(x, y) = channel_value(image, reflect101(o.x + x, image.width), sy, c);
      }
      if (patch_size != n) plane = lanczos_resize(plane, n, n);
      const auto ci = static_cast<std::size_t>(c);
      for (std::size_t i = 0; i < plane.size(); ++i)
        tensor[ci * n * n + i] = static_cast<float>((plane[i] - manifest_.mean[ci]) / manifest_.stddev[ci]);
    }
    return tensor;
  }

  double score_patch(const ColorImage& image, PatchOrigin o, int patch_size) const {
    std::vector<float> tensor = patch_tensor(image, o, patch_size);
    const int n = manifest_.input_size;
    const int dims[4] = {1, manifest_.channels(), n, n};
    cv::Mat blob(4, dims, CV_32F, tensor.data());
    std::vector<float> out;
    {
      std::lock_guard lock(mutex_);
      try {
        net_.setInput(blob);
        cv::Mat result = net_.forward();
        result = result.reshape(1, 1);
        out.assign(result.ptr<float>(), result.ptr<float>() + result.total());
      } catch (const cv::Exception& e) {
        throw Error(ErrorKind::Backend, std::string("model forward failed: ") + e.what());
      }
    }
    return crack_probability(out, manifest_);
  }

  PatchScoreGrid score_patches(const ColorImage& image, int patch_size, int stride) const override {
    const PatchGrid grid(image.width, image.height, patch_size, stride);
    PatchScoreGrid g{grid.cols(), grid.rows(), patch_size, stride, image.width, image.height, {}};
    g.scores.resize(grid.count());
    for (std::size_t i = 0; i < grid.count(); ++i)
      g.scores[i] = static_cast<float>(score_patch(image, grid.origin(i), patch_size));
    return g;
  }

 private:
  float channel_value(const ColorImage& img, int x, int y, int c) const {
    if (manifest_.channel_order == "GRAY") {
      if (img.channels == 1) return img.at(x, y, 0);
      return static_cast<float>(0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2));
    }
    if (img.channels == 1) return img.at(x, y, 0);
    return img.at(x, y, manifest_.channel_order == "BGR" ? 2 - c : c);
  }

  ModelManifest manifest_;
  mutable cv::dnn::Net net_;
  mutable std::mutex mutex_;
};

}  // namespace weakseg
