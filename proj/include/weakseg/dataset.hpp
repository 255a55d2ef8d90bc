#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "weakseg/image.hpp"
#include "weakseg/patch_grid.hpp"

namespace weakseg {

/// Crack label per grid origin (grid order): 1 iff any ground-truth pixel
/// inside the in-image part of the footprint is set.
inline std::vector<std::uint8_t> extract_patch_labels(const BinaryMask& gt, int patch_size = 128, int stride = 64) {
  const PatchGrid grid(gt.width(), gt.height(), patch_size, stride);
  std::vector<std::uint8_t> labels(grid.count(), 0);
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const PatchOrigin o = grid.origin(i);
    const int x1 = std::min(gt.width(), o.x + patch_size);
    const int y1 = std::min(gt.height(), o.y + patch_size);
    bool hit = false;
    for (int y = o.y; y < y1 && !hit; ++y)
      for (int x = o.x; x < x1 && !hit; ++x) hit = gt(x, y) != 0;
    labels[i] = hit ? 1 : 0;
  }
  return labels;
}

enum class DatasetName { CFD, DCD, AEL };

inline DatasetName parse_dataset_name(const std::string& s) {
  if (s == "CFD" || s == "cfd") return DatasetName::CFD;
  if (s == "DCD" || s == "dcd") return DatasetName::DCD;
  if (s == "AEL" || s == "ael") return DatasetName::AEL;
  throw Error(ErrorKind::Usage, "unknown dataset '" + s + "' (expected CFD, DCD or AEL)");
}

inline const char* to_string(DatasetName n) {
  switch (n) {
    case DatasetName::CFD: return "CFD";
    case DatasetName::DCD: return "DCD";
    case DatasetName::AEL: return "AEL";
  }
  return "?";
}

/// Published split sizes. CFD drops image 042 (faulty ground truth).
struct SplitSizes {
  std::size_t train;
  std::size_t test;
  std::size_t validation;
};

inline SplitSizes split_sizes(DatasetName n) {
  switch (n) {
    case DatasetName::CFD: return {71, 46, 7};
    case DatasetName::DCD: return {300, 237, 30};
    case DatasetName::AEL: return {34, 24, 4};
  }
  return {0, 0, 0};
}

struct DatasetSpec {
  DatasetName name = DatasetName::CFD;
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::size_t validation_count = 0;
};

/// Builds the split description from the image names found on disk. When
/// no official lists are given the sorted names are split at the published
/// training count. Counts must match the published sizes.
inline DatasetSpec make_dataset_spec(DatasetName name, std::vector<std::string> names,
                                     std::optional<std::vector<std::string>> train_list = std::nullopt,
                                     std::optional<std::vector<std::string>> test_list = std::nullopt) {
  const SplitSizes sizes = split_sizes(name);
  auto drop_excluded = [&](std::vector<std::string>& v) {
    if (name == DatasetName::CFD) std::erase(v, std::string("042"));
  };
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  drop_excluded(names);

  DatasetSpec spec{name, {}, {}, sizes.validation};
  if (train_list && test_list) {
    spec.train = *train_list;
    spec.test = *test_list;
    drop_excluded(spec.train);
    drop_excluded(spec.test);
    const std::set<std::string> available(names.begin(), names.end());
    for (const auto* list : {&spec.train, &spec.test})
      for (const auto& n : *list)
        if (!available.count(n)) throw Error(ErrorKind::Dataset, "split lists name missing image '" + n + "'");
  } else if (train_list || test_list) {
    throw Error(ErrorKind::Usage, "give both train and test lists or neither");
  } else {
    if (names.size() != sizes.train + sizes.test)
      throw Error(ErrorKind::Dataset, std::string(to_string(name)) + " expects " +
                                          std::to_string(sizes.train + sizes.test) + " images, found " +
                                          std::to_string(names.size()));
    spec.train.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(sizes.train));
    spec.test.assign(names.begin() + static_cast<std::ptrdiff_t>(sizes.train), names.end());
  }
  if (spec.train.size() != sizes.train || spec.test.size() != sizes.test)
    throw Error(ErrorKind::Dataset, std::string(to_string(name)) + " split must be " + std::to_string(sizes.train) +
                                        "/" + std::to_string(sizes.test) + ", got " +
                                        std::to_string(spec.train.size()) + "/" + std::to_string(spec.test.size()));
  const std::set<std::string> train_set(spec.train.begin(), spec.train.end());
  for (const auto& n : spec.test)
    if (train_set.count(n)) throw Error(ErrorKind::Dataset, "image '" + n + "' is in both train and test");
  return spec;
}

struct DatasetSplits {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  bool operator==(const DatasetSplits&) const = default;
};

namespace detail {

// Uniform draw in [0, n) by rejection; unlike std::uniform_int_distribution
// the sequence is identical on every standard library.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do v = rng();
  while (v >= limit);
  return v % n;
}

}  // namespace detail

/// Seeded Fisher-Yates shuffle of the sorted training names; the first
/// validation_count names become the validation set.
inline DatasetSplits make_splits(const DatasetSpec& spec, std::uint64_t seed) {
  std::vector<std::string> train = spec.train;
  std::sort(train.begin(), train.end());
  if (spec.validation_count > train.size()) throw Error(ErrorKind::Dataset, "validation set larger than training set");
  std::mt19937_64 rng(seed);
  for (std::size_t i = train.size(); i > 1; --i) std::swap(train[i - 1], train[detail::uniform_below(rng, i)]);
  DatasetSplits out;
  out.validation.assign(train.begin(), train.begin() + static_cast<std::ptrdiff_t>(spec.validation_count));
  out.train.assign(train.begin() + static_cast<std::ptrdiff_t>(spec.validation_count), train.end());
  out.test = spec.test;
  std::sort(out.test.begin(), out.test.end());
  return out;
}

/// Newline-separated names; blank lines and surrounding whitespace ignored.
inline std::vector<std::string> read_name_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    names.push_back(std::filesystem::path(line.substr(b, e - b + 1)).stem().string());
  }
  return names;
}

inline std::string format_name_list(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += n + "\n";
  return out;
}

/// Image files (PNG/JPEG) in a directory keyed by stem, sorted.
inline std::map<std::string, std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::Dataset, "not a directory: " + dir.string());
  std::map<std::string, std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext != ".png" && ext != ".jpg" && ext != ".jpeg") continue;
    const std::string stem = entry.path().stem().string();
    if (out.count(stem)) throw Error(ErrorKind::Dataset, "two images share the name '" + stem + "' in " + dir.string());
    out.emplace(stem, entry.path());
  }
  return out;
}

}  // namespace weakseg
