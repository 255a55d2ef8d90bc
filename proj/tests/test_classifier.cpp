#include <gtest/gtest.h>

#include <filesystem>

#include "weakseg/classifier.hpp"
#include "weakseg/scoremap_io.hpp"

using namespace weakseg;
namespace fs = std::filesystem;

namespace {

PatchScoreGrid uniform_grid(int w, int h, int patch, int stride, float score) {
  const PatchGrid g(w, h, patch, stride);
  return PatchScoreGrid{g.cols(), g.rows(), patch, stride, w, h, std::vector<float>(g.count(), score)};
}

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "weakseg_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(ScoreGridFile, RoundTrip) {
  PatchScoreGrid g = uniform_grid(70, 40, 32, 16, 0.25f);
  g.scores[3] = 1.0f;
  const auto path = temp_path("grid.psg");
  save_psg(g, path);
  EXPECT_EQ(load_psg(path), g);
  const Bytes b = encode_psg(g);
  EXPECT_EQ(b.size(), 4u + 24u + 4u * g.scores.size());
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "PSG1");
}

TEST(ScoreGridFile, Rejections) {
  const PatchScoreGrid g = uniform_grid(64, 64, 32, 16, 0.5f);
  Bytes bad_magic = encode_psg(g);
  bad_magic[3] = '2';
  EXPECT_THROW(decode_psg(bad_magic), Error);
  Bytes short_payload = encode_psg(g);
  short_payload.pop_back();
  EXPECT_THROW(decode_psg(short_payload), Error);

  PatchScoreGrid wrong_dims = g;
  wrong_dims.grid_w = 2;
  wrong_dims.scores.resize(6);
  try {
    decode_psg(encode_psg(wrong_dims));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  PatchScoreGrid out_of_range = g;
  out_of_range.scores[0] = 1.5f;
  try {
    decode_psg(encode_psg(out_of_range));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

TEST(FileScorer, PassesStoredGridThrough) {
  const FileScorer backend(uniform_grid(64, 64, 32, 16, 0.9f));
  ColorImage img{64, 64, 3, std::vector<float>(64 * 64 * 3, 0.1f)};
  const PatchScoreGrid a = score_patches(backend, img);
  for (float s : a.scores) EXPECT_EQ(s, 0.9f);
  img.data[5] = 0.7f;
  EXPECT_EQ(score_patches(backend, img), a);
  EXPECT_EQ(score_patches(backend, Raster(64, 64, 0.3f)), a);
}

TEST(FileScorer, SizeMismatchIsConfigError) {
  const FileScorer backend(uniform_grid(64, 64, 32, 16, 0.9f));
  try {
    score_patches(backend, Raster(128, 128, 0.5f));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  EXPECT_THROW(score_patches(backend, Raster(64, 64, 0.5f), 32, 8), Error);
}

TEST(Cam, SameSizeIsPassthrough) {
  ScoreMap cam(5, 4);
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = static_cast<float>(i) / 20.0f;
  const auto path = temp_path("cam_same.smap");
  save_scoremap(cam, path);
  EXPECT_EQ(load_cam(path, 5, 4), cam);
}

TEST(Cam, QuarterResolutionConstantStaysConstant) {
  const auto path = temp_path("cam_quarter.smap");
  save_scoremap(ScoreMap(16, 12, 0.6f), path);
  const ScoreMap cam = load_cam(path, 64, 48);
  ASSERT_EQ(cam.width(), 64);
  ASSERT_EQ(cam.height(), 48);
  for (float v : cam.data()) EXPECT_NEAR(v, 0.6f, 1e-5);
}

TEST(Cam, ValuesAboveOneAreClamped) {
  // save_scoremap refuses out-of-range maps, so write the bytes directly.
  const auto path = temp_path("cam_hot.smap");
  write_file_atomic(path, encode_smap(ScoreMap(3, 3, 1.2f)));
  const ScoreMap cam = load_cam(path, 3, 3);
  for (float v : cam.data()) EXPECT_EQ(v, 1.0f);
  EXPECT_THROW(load_scoremap(path), Error);
}
