// weakseg: command-line front end for the crack segmentation pipeline.
//
// Exit codes: 0 success, 2 usage, 3 data/format, 4 internal.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "weakseg/weakseg.hpp"
#ifdef WEAKSEG_WITH_ONNX
#include "weakseg/onnx_scorer.hpp"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace weakseg;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

std::string sha256_hex(const fs::path& path) {
  const Bytes bytes = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

/// Config file plus per-flag overrides shared by the pipeline commands.
struct ConfigOptions {
  std::string config_path;
  std::optional<int> loc_patch, loc_stride, thr_patch, thr_stride, bilateral_d;
  std::optional<double> sigma_s, sigma_r, cut;
  std::optional<int> erosion_iterations, closing_iterations, gold_dilation;
  std::optional<std::string> otsu_mode;
  bool no_bilateral = false;
  bool no_closing = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON pipeline configuration")->check(CLI::ExistingFile);
    app->add_option("--loc-patch", loc_patch, "localisation patch size");
    app->add_option("--loc-stride", loc_stride, "localisation stride");
    app->add_option("--thr-patch", thr_patch, "thresholding patch size");
    app->add_option("--thr-stride", thr_stride, "thresholding stride");
    app->add_option("--sigma-s", sigma_s, "bilateral spatial sigma (pixels)");
    app->add_option("--sigma-r", sigma_r, "bilateral range sigma (0-255 scale)");
    app->add_option("--bilateral-d", bilateral_d, "bilateral neighborhood radius");
    app->add_option("--cut", cut, "localisation retention cut");
    app->add_option("--erosion-iterations", erosion_iterations, "3x3 erosion iterations");
    app->add_option("--closing-iterations", closing_iterations, "3x3 closing iterations");
    app->add_option("--gold-dilation", gold_dilation, "square dilation size for the gold standard");
    app->add_option("--otsu-mode", otsu_mode, "two | three")->check(CLI::IsMember({"two", "three"}));
    app->add_flag("--no-bilateral", no_bilateral, "disable both bilateral filters");
    app->add_flag("--no-closing", no_closing, "disable the closing step");
  }

  /// Returns the effective config and records flag overrides.
  PipelineConfig resolve(json& overrides) const {
    PipelineConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        from_json(json::parse(in), cfg);
      } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Format, config_path + ": " + e.what());
      }
    }
    overrides = json::object();
    auto apply = [&](const char* key, const auto& opt, auto& field) {
      if (opt) {
        field = *opt;
        overrides[key] = *opt;
      }
    };
    apply("loc_patch", loc_patch, cfg.loc_patch);
    apply("loc_stride", loc_stride, cfg.loc_stride);
    apply("thr_patch", thr_patch, cfg.thr_patch);
    apply("thr_stride", thr_stride, cfg.thr_stride);
    apply("bilateral_sigma_s", sigma_s, cfg.bilateral_sigma_s);
    apply("bilateral_sigma_r", sigma_r, cfg.bilateral_sigma_r);
    apply("bilateral_d", bilateral_d, cfg.bilateral_d);
    apply("cut", cut, cfg.cut);
    apply("erosion.iterations", erosion_iterations, cfg.erosion.iterations);
    apply("closing.iterations", closing_iterations, cfg.closing.iterations);
    if (gold_dilation) {
      cfg.gold_dilation.width = cfg.gold_dilation.height = *gold_dilation;
      overrides["gold_dilation.size"] = *gold_dilation;
    }
    if (otsu_mode) {
      cfg.otsu_mode = parse_otsu_mode(*otsu_mode);
      overrides["otsu_mode"] = *otsu_mode;
    }
    if (no_bilateral) {
      cfg.enable_bilateral = false;
      overrides["enable_bilateral"] = false;
    }
    if (no_closing) {
      cfg.enable_closing = false;
      overrides["enable_closing"] = false;
    }
    cfg.validate();
    return cfg;
  }
};

/// Provenance record written next to every output. Contains no timestamps,
/// so reruns produce identical bytes.
json run_manifest(const std::string& command, const std::vector<fs::path>& inputs, const PipelineConfig* cfg,
                  const std::string& config_file, const json& overrides) {
  json m;
  m["tool"] = "weakseg";
  m["version"] = kVersion;
  m["command"] = command;
  json in = json::array();
  for (const auto& p : inputs) in.push_back({{"path", p.generic_string()}, {"sha256", sha256_hex(p)}});
  m["inputs"] = in;
  if (cfg) {
    m["config"] = *cfg;
    m["config_file"] = config_file;
    m["overrides"] = overrides;
  }
  return m;
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

/// Stem -> path pairs that must match between two directories. With a name
/// list only those names are required.
std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> match_by_stem(
    const std::map<std::string, fs::path>& a, const std::map<std::string, fs::path>& b, const char* a_what,
    const char* b_what, const std::string& names_file) {
  std::vector<std::string> names;
  if (!names_file.empty()) {
    names = read_name_list(names_file);
  } else {
    for (const auto& [stem, _] : a) names.push_back(stem);
    for (const auto& [stem, _] : b)
      if (!a.count(stem)) throw Error(ErrorKind::Dataset, std::string(b_what) + " '" + stem + "' has no " + a_what);
  }
  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> out;
  for (const auto& n : names) {
    auto ia = a.find(n);
    auto ib = b.find(n);
    if (ia == a.end()) throw Error(ErrorKind::Dataset, std::string("no ") + a_what + " named '" + n + "'");
    if (ib == b.end()) throw Error(ErrorKind::Dataset, std::string(a_what) + " '" + n + "' has no " + b_what);
    out.push_back({n, {ia->second, ib->second}});
  }
  return out;
}

// --- segment / localize -----------------------------------------------------

struct ScoringOptions {
  std::string scores;
  std::string cam;
  std::string model;
  std::string model_manifest;

  void attach(CLI::App* app) {
    app->add_option("--scores", scores, "precomputed patch scores (.psg)")->check(CLI::ExistingFile);
    app->add_option("--cam", cam, "class activation map (.smap)")->check(CLI::ExistingFile);
    app->add_option("--model", model, "ONNX classifier")->check(CLI::ExistingFile);
    app->add_option("--manifest", model_manifest, "JSON manifest for --model")->check(CLI::ExistingFile);
  }

  std::unique_ptr<PatchScorer> backend(std::vector<fs::path>& inputs) const {
    if (scores.empty() && model.empty())
      throw Error(ErrorKind::Usage, "one of --scores or --model is required");
    if (!scores.empty() && !model.empty()) throw Error(ErrorKind::Usage, "--scores and --model are exclusive");
    if (cam.empty()) throw Error(ErrorKind::Usage, "--cam is required");
    if (!scores.empty()) {
      inputs.push_back(scores);
      return std::make_unique<FileScorer>(fs::path(scores));
    }
    if (model_manifest.empty()) throw Error(ErrorKind::Usage, "--model needs --manifest");
#ifdef WEAKSEG_WITH_ONNX
    inputs.push_back(model);
    inputs.push_back(model_manifest);
    return std::make_unique<OnnxScorer>(fs::path(model), ModelManifest::load(model_manifest));
#else
    throw Error(ErrorKind::Usage, "this build has no ONNX support");
#endif
  }
};

struct SegmentCommand {
  std::string image;
  std::string out_dir;
  bool debug = false;
  bool overlay = false;
  ScoringOptions scoring;
  ConfigOptions config;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("segment", "weakly-supervised segmentation of one image");
    sub->add_option("image", image, "input image (PNG or JPEG)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "output directory")->required();
    sub->add_flag("--debug", debug, "also write interim maps");
    sub->add_flag("--overlay", overlay, "also write a red overlay PNG");
    scoring.attach(sub);
    config.attach(sub);
    sub->callback([this] { run(); });
  }

  void run() const {
    json overrides;
    const PipelineConfig cfg = config.resolve(overrides);
    std::vector<fs::path> inputs{image};
    auto backend = scoring.backend(inputs);
    inputs.push_back(scoring.cam);
    if (!config.config_path.empty()) inputs.push_back(config.config_path);

    const ColorImage img = load_image(image);
    const ScoreMap cam = load_cam(scoring.cam, img.width, img.height);
    const SegmentResult r = segment_detailed(img, *backend, cam, cfg);

    ensure_dir(out_dir);
    const std::string stem = fs::path(image).stem().string();
    const fs::path dir(out_dir);
    save_scoremap(r.confidence, dir / (stem + ".smap"));
    save_png(r.confidence, dir / (stem + ".png"));
    if (debug) {
      save_scoremap(r.patch_map, dir / (stem + "_patchmap.smap"));
      save_scoremap(r.localisation, dir / (stem + "_localisation.smap"));
      save_scoremap(retag<ScoreMap>(r.threshold), dir / (stem + "_threshold.smap"));
      save_png(r.threshold, dir / (stem + "_threshold.png"));
    }
    if (overlay) save_png(red_overlay(img, r.confidence), dir / (stem + "_overlay.png"));
    write_json(dir / (stem + ".manifest.json"), run_manifest("segment", inputs, &cfg, config.config_path, overrides));
  }
};

struct LocalizeCommand {
  std::string image;
  std::string out_dir;
  ScoringOptions scoring;
  ConfigOptions config;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("localize", "coarse localisation map only");
    sub->add_option("image", image, "input image")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "output directory")->required();
    scoring.attach(sub);
    config.attach(sub);
    sub->callback([this] { run(); });
  }

  void run() const {
    json overrides;
    const PipelineConfig cfg = config.resolve(overrides);
    std::vector<fs::path> inputs{image};
    auto backend = scoring.backend(inputs);
    inputs.push_back(scoring.cam);
    const ColorImage img = load_image(image);
    const ScoreMap cam = load_cam(scoring.cam, img.width, img.height);
    const PatchScoreGrid grid = score_patches(*backend, img, cfg.loc_patch, cfg.loc_stride);
    const ScoreMap patch_map = localisation_from_scores(grid, img.width, img.height);
    const ScoreMap loc = merge_localisation(patch_map, cam, cfg);

    ensure_dir(out_dir);
    const std::string stem = fs::path(image).stem().string();
    const fs::path dir(out_dir);
    save_scoremap(patch_map, dir / (stem + "_patchmap.smap"));
    save_scoremap(loc, dir / (stem + "_localisation.smap"));
    save_png(loc, dir / (stem + "_localisation.png"));
    write_json(dir / (stem + "_localisation.manifest.json"),
               run_manifest("localize", inputs, &cfg, config.config_path, overrides));
  }
};

// --- threshold ----------------------------------------------------------------

struct ThresholdCommand {
  std::string image;
  std::string out_dir;
  std::string method = "patch";
  int window = 33;
  ConfigOptions config;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("threshold", "thresholding segmentation only");
    sub->add_option("image", image, "input image")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "output directory")->required();
    sub->add_option("--method", method, "patch | otsu2 | otsu3 | niblack | sauvola")
        ->check(CLI::IsMember({"patch", "otsu2", "otsu3", "niblack", "sauvola"}));
    sub->add_option("--window", window, "Niblack/Sauvola window (odd)");
    config.attach(sub);
    sub->callback([this] { run(); });
  }

  void run() const {
    json overrides;
    const PipelineConfig cfg = config.resolve(overrides);
    const Raster gray = load_gray(image);
    BinaryMask mask;
    if (method == "patch") {
      mask = threshold_segment(gray, cfg);
    } else {
      // Whole-image baselines run on the raw image.
      if (method == "otsu2") mask = global_otsu_segment(gray, OtsuMode::TwoClass);
      if (method == "otsu3") mask = global_otsu_segment(gray, OtsuMode::ThreeClass);
      if (method == "niblack") mask = niblack(gray, window);
      if (method == "sauvola") mask = sauvola(gray, window);
    }
    ensure_dir(out_dir);
    const std::string stem = fs::path(image).stem().string();
    const fs::path dir(out_dir);
    save_png(mask, dir / (stem + "_" + method + ".png"));
    save_scoremap(retag<ScoreMap>(mask), dir / (stem + "_" + method + ".smap"));
    json m = run_manifest("threshold", {image}, &cfg, config.config_path, overrides);
    m["method"] = method;
    if (method == "niblack" || method == "sauvola") m["window"] = window;
    write_json(dir / (stem + "_" + method + ".manifest.json"), m);
  }
};

// --- goldstd ------------------------------------------------------------------

struct GoldStdCommand {
  std::string gt_dir;
  std::string image_dir;
  std::string out_dir;
  std::string names;
  bool debug = false;
  ConfigOptions config;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("goldstd", "classifier-free upper bound from dilated ground truth");
    sub->add_option("gt-dir", gt_dir, "ground-truth masks")->required()->check(CLI::ExistingDirectory);
    sub->add_option("image-dir", image_dir, "images")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out-dir", out_dir, "output directory")->required();
    sub->add_option("--names", names, "restrict to the names in this list")->check(CLI::ExistingFile);
    sub->add_flag("--debug", debug, "also write interim maps");
    config.attach(sub);
    sub->callback([this] { run(); });
  }

  void run() const {
    json overrides;
    const PipelineConfig cfg = config.resolve(overrides);
    const auto pairs = match_by_stem(list_images(image_dir), list_images(gt_dir), "image", "ground truth", names);
    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    parallel_for(pairs.size(), [&](std::size_t i) {
      const auto& [stem, paths] = pairs[i];
      const SegmentResult r = gold_standard_segment(load_image(paths.first), load_mask(paths.second), cfg);
      save_scoremap(r.confidence, dir / (stem + ".smap"));
      save_png(r.confidence, dir / (stem + ".png"));
      if (debug) {
        save_scoremap(r.localisation, dir / (stem + "_localisation.smap"));
        save_png(r.threshold, dir / (stem + "_threshold.png"));
      }
    });
    std::vector<fs::path> inputs;
    for (const auto& [stem, paths] : pairs) {
      inputs.push_back(paths.first);
      inputs.push_back(paths.second);
    }
    write_json(dir / "goldstd.manifest.json", run_manifest("goldstd", inputs, &cfg, config.config_path, overrides));
    std::cout << "goldstd: wrote " << pairs.size() << " maps to " << out_dir << "\n";
  }
};

// --- eval / eval-cls -------------------------------------------------------------

/// Predictions keyed by stem: .smap preferred, otherwise gray PNG/JPEG.
std::map<std::string, fs::path> list_predictions(const fs::path& dir) {
  auto out = list_images(dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".smap") out[entry.path().stem().string()] = entry.path();
  return out;
}

ScoreMap load_prediction(const fs::path& p) {
  if (p.extension() == ".smap") return load_scoremap(p);
  return retag<ScoreMap>(load_gray(p));
}

struct EvalCommand {
  std::string pred_dir;
  std::string gt_dir;
  std::string out;
  std::string names;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("eval", "macro F1 of predicted maps against ground truth");
    sub->add_option("pred-dir", pred_dir, "predicted maps (.smap or PNG)")->required()->check(CLI::ExistingDirectory);
    sub->add_option("gt-dir", gt_dir, "ground-truth masks")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out", out, "write the JSON report here instead of stdout");
    sub->add_option("--names", names, "evaluate only these names")->check(CLI::ExistingFile);
    sub->callback([this] { run(); });
  }

  void run() const {
    const auto gts = list_images(gt_dir);
    const auto preds = list_predictions(pred_dir);
    std::vector<std::string> wanted = names.empty() ? std::vector<std::string>{} : read_name_list(names);
    if (names.empty())
      for (const auto& [stem, _] : gts) wanted.push_back(stem);
    if (wanted.empty()) throw Error(ErrorKind::Dataset, "no ground-truth masks in " + gt_dir);
    std::vector<ScoreMap> p(wanted.size());
    std::vector<BinaryMask> g(wanted.size());
    parallel_for(wanted.size(), [&](std::size_t i) {
      auto gi = gts.find(wanted[i]);
      auto pi = preds.find(wanted[i]);
      if (gi == gts.end()) throw Error(ErrorKind::Dataset, "no ground truth named '" + wanted[i] + "'");
      if (pi == preds.end()) throw Error(ErrorKind::Dataset, "no prediction for '" + wanted[i] + "'");
      g[i] = load_mask(gi->second);
      p[i] = load_prediction(pi->second);
    });
    const MacroF1 result = macro_f1(p, g);
    json report;
    report["f1"] = result.f1;
    report["best_t"] = result.best_t;
    report["images"] = wanted.size();
    json curve = json::array();
    for (const auto& pt : result.curve) curve.push_back({{"t", pt.t}, {"p", pt.precision}, {"r", pt.recall}});
    report["per_threshold"] = curve;
    if (out.empty())
      std::cout << report.dump(2) << "\n";
    else
      write_json(out, report);
  }
};

struct EvalClsCommand {
  std::string csv;
  std::string out;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("eval-cls", "patch classification F1 from a CSV with score,label columns");
    sub->add_option("csv", csv, "CSV with header containing 'score' and 'label'")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "write the JSON report here instead of stdout");
    sub->callback([this] { run(); });
  }

  static std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  }

  void run() const {
    std::ifstream in(csv);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Format, csv + ": empty file");
    const auto header = split_csv(line);
    const auto col = [&](const char* name) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw Error(ErrorKind::Format, csv + ": missing column '" + name + "'");
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t score_col = col("score");
    const std::size_t label_col = col("label");
    std::vector<double> scores;
    std::vector<int> labels;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \r") == std::string::npos) continue;
      const auto cells = split_csv(line);
      if (cells.size() <= std::max(score_col, label_col)) throw Error(ErrorKind::Format, csv + ": short row");
      try {
        scores.push_back(std::stod(cells[score_col]));
        labels.push_back(std::stoi(cells[label_col]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Format, csv + ": bad number in row '" + line + "'");
      }
    }
    json report{{"f1", classification_f1(scores, labels)}, {"items", scores.size()}};
    if (out.empty())
      std::cout << report.dump(2) << "\n";
    else
      write_json(out, report);
  }
};

// --- tile -------------------------------------------------------------------------

struct TileCommand {
  std::string image_dir;
  std::string gt_dir;
  std::string out;
  int patch = 128;
  int stride = 64;
  std::string dataset;
  std::uint64_t seed = 0;
  std::string train_list;
  std::string test_list;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("tile", "export labeled classifier training patches");
    sub->add_option("image-dir", image_dir, "images")->required()->check(CLI::ExistingDirectory);
    sub->add_option("gt-dir", gt_dir, "ground-truth masks")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--patch", patch, "patch size");
    sub->add_option("--stride", stride, "patch stride");
    sub->add_option("--dataset", dataset, "CFD | DCD | AEL: split into train/val/test");
    sub->add_option("--seed", seed, "validation carve-out seed");
    sub->add_option("--train-list", train_list, "official training names")->check(CLI::ExistingFile);
    sub->add_option("--test-list", test_list, "official test names")->check(CLI::ExistingFile);
    sub->callback([this] { run(); });
  }

  void run() const {
    const auto pairs = match_by_stem(list_images(image_dir), list_images(gt_dir), "image", "ground truth", "");
    std::map<std::string, std::string> split_of;
    const fs::path dir(out);
    ensure_dir(dir / "pos");
    ensure_dir(dir / "neg");
    if (!dataset.empty()) {
      std::vector<std::string> names;
      for (const auto& [stem, _] : pairs) names.push_back(stem);
      std::optional<std::vector<std::string>> tr, te;
      if (!train_list.empty()) tr = read_name_list(train_list);
      if (!test_list.empty()) te = read_name_list(test_list);
      const DatasetSplits splits = make_splits(make_dataset_spec(parse_dataset_name(dataset), names, tr, te), seed);
      ensure_dir(dir / "splits");
      write_text_atomic(dir / "splits" / "train.txt", format_name_list(splits.train));
      write_text_atomic(dir / "splits" / "val.txt", format_name_list(splits.validation));
      write_text_atomic(dir / "splits" / "test.txt", format_name_list(splits.test));
      for (const auto& n : splits.train) split_of[n] = "train";
      for (const auto& n : splits.validation) split_of[n] = "val";
      for (const auto& n : splits.test) split_of[n] = "test";
    }

    std::vector<std::string> rows(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
      const auto& [stem, paths] = pairs[i];
      std::string split = "all";
      if (!dataset.empty()) {
        auto it = split_of.find(stem);
        if (it == split_of.end()) return;  // excluded from the dataset
        split = it->second;
      }
      const ColorImage img = load_image(paths.first);
      const BinaryMask gt = load_mask(paths.second);
      if (gt.width() != img.width || gt.height() != img.height)
        throw Error(ErrorKind::Shape, stem + ": image and ground truth differ in size");
      const PatchGrid grid(img.width, img.height, patch, stride);
      const auto labels = extract_patch_labels(gt, patch, stride);
      for (std::size_t k = 0; k < grid.count(); ++k) {
        const PatchOrigin o = grid.origin(k);
        ColorImage tile{patch, patch, img.channels, std::vector<float>(static_cast<std::size_t>(patch) * patch * img.channels)};
        for (int y = 0; y < patch; ++y)
          for (int x = 0; x < patch; ++x)
            for (int c = 0; c < img.channels; ++c)
              tile.data[(static_cast<std::size_t>(y) * patch + x) * img.channels + c] =
                  img.at(reflect101(o.x + x, img.width), reflect101(o.y + y, img.height), c);
        const std::string sub = labels[k] ? "pos" : "neg";
        const std::string file = stem + "_x" + std::to_string(o.x) + "_y" + std::to_string(o.y) + ".png";
        save_png(tile, dir / sub / file);
        rows[i] += sub + "/" + file + "," + stem + "," + std::to_string(o.x) + "," + std::to_string(o.y) + "," +
                   std::to_string(labels[k]) + "," + split + "\n";
      }
    });
    std::string index = "file,image,x,y,label,split\n";
    for (const auto& r : rows) index += r;
    write_text_atomic(dir / "index.csv", index);
  }
};

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::Usage ? kExitUsage : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakseg: weakly-supervised surface crack segmentation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SegmentCommand segment_cmd;
  GoldStdCommand goldstd_cmd;
  EvalCommand eval_cmd;
  EvalClsCommand eval_cls_cmd;
  TileCommand tile_cmd;
  ThresholdCommand threshold_cmd;
  LocalizeCommand localize_cmd;
  segment_cmd.attach(app);
  goldstd_cmd.attach(app);
  eval_cmd.attach(app);
  eval_cls_cmd.attach(app);
  tile_cmd.attach(app);
  threshold_cmd.attach(app);
  localize_cmd.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "weakseg: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "weakseg: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
