#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "weakseg/image.hpp"
#include "weakseg/image_io.hpp"
#include "weakseg/parallel.hpp"
#include "weakseg/patch_grid.hpp"
#include "weakseg/resample.hpp"
#include "weakseg/scoremap_io.hpp"

using namespace weakseg;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "weakseg_tests";
  fs::create_directories(dir);
  return dir / name;
}

ColorImage rgb_pixel(float r, float g, float b) { return ColorImage{1, 1, 3, {r, g, b}}; }

}  // namespace

TEST(Grayscale, LumaWeights) {
  EXPECT_FLOAT_EQ(to_grayscale(rgb_pixel(1, 1, 1))[0], 1.0f);
  EXPECT_FLOAT_EQ(to_grayscale(rgb_pixel(0, 0, 0))[0], 0.0f);
  EXPECT_FLOAT_EQ(to_grayscale(rgb_pixel(1, 0, 0))[0], 0.299f);
  EXPECT_FLOAT_EQ(to_grayscale(rgb_pixel(0, 1, 0))[0], 0.587f);
}

TEST(Grayscale, RejectsWrongChannelCount) {
  ColorImage two{1, 1, 2, {0.1f, 0.2f}};
  try {
    to_grayscale(two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Shape);
  }
}

TEST(MirrorPad, ReflectsWithoutRepeatingEdge) {
  Raster row(3, 1, std::vector<float>{0.1f, 0.2f, 0.3f});
  const Raster p = mirror_pad(row, 1, 0, 0, 0);
  ASSERT_EQ(p.width(), 4);
  EXPECT_EQ(std::vector<float>(p.data().begin(), p.data().end()), (std::vector<float>{0.2f, 0.1f, 0.2f, 0.3f}));
}

TEST(MirrorPad, ZeroMarginsIsIdentity) {
  std::mt19937 rng(1);
  const Raster r = oracle::random_raster(rng, 5, 4);
  EXPECT_EQ(mirror_pad(r, 0, 0, 0, 0), r);
}

TEST(MirrorPad, TwoByTwoAllSides) {
  // a b      d c d c
  // c d  ->  b a b a
  //          d c d c
  //          b a b a
  Raster r(2, 2, std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f});
  const Raster p = mirror_pad(r, 1, 1, 1, 1);
  const std::vector<float> expected{0.4f, 0.3f, 0.4f, 0.3f, 0.2f, 0.1f, 0.2f, 0.1f,
                                    0.4f, 0.3f, 0.4f, 0.3f, 0.2f, 0.1f, 0.2f, 0.1f};
  EXPECT_EQ(std::vector<float>(p.data().begin(), p.data().end()), expected);
}

TEST(MirrorPad, MarginNotSmallerThanDimensionFails) {
  Raster r(3, 3, 0.5f);
  try {
    mirror_pad(r, 3, 0, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Padding);
  }
  EXPECT_THROW(mirror_pad(r, 0, 0, 0, 5), Error);
}

TEST(MirrorPad, PadThenCropIsIdentityProperty) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int w = std::uniform_int_distribution<int>(1, 20)(rng);
    const int h = std::uniform_int_distribution<int>(1, 20)(rng);
    auto margin = [&](int dim) { return std::uniform_int_distribution<int>(0, dim - 1)(rng); };
    const int l = margin(w), rt = margin(w), t = margin(h), b = margin(h);
    const Raster r = oracle::random_raster(rng, w, h);
    const Raster p = mirror_pad(r, l, rt, t, b);
    ASSERT_EQ(crop(p, l, t, w, h), r);
    // every padded value matches the independent reflection
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x) ASSERT_EQ(p(x, y), oracle::px(r, x - l, y - t));
  }
}

TEST(Reflect101, FoldsFarOutsideIndices) {
  for (int n = 1; n < 7; ++n)
    for (int i = -40; i < 40; ++i) ASSERT_EQ(reflect101(i, n), oracle::reflect(i, n)) << i << " " << n;
}

TEST(PatchGrid, SixtyFourByThirtyTwoStrideSixteen) {
  const PatchGrid g = make_patch_grid(64, 64, 32, 16);
  EXPECT_EQ(g.cols(), 3);
  EXPECT_EQ(g.rows(), 3);
  EXPECT_EQ(g.count(), 9u);
  EXPECT_EQ(g.origin(2, 0).x, 32);
}

TEST(PatchGrid, PatchCoversImage) {
  const PatchGrid g = make_patch_grid(32, 32, 32, 8);
  ASSERT_EQ(g.count(), 1u);
  EXPECT_EQ(g.origin(0), (PatchOrigin{0, 0}));
}

TEST(PatchGrid, LastOriginReachesPastRightEdge) {
  const PatchGrid g = make_patch_grid(70, 32, 32, 16);
  ASSERT_EQ(g.cols(), 4);
  EXPECT_EQ(g.origin(3, 0).x, 48);
  EXPECT_EQ(g.origin(3, 0).x + 32 - 70, 10);  // mirror-padded columns
}

TEST(PatchGrid, SmallImageSingleColumn) {
  const PatchGrid g = make_patch_grid(10, 50, 32, 8);
  EXPECT_EQ(g.cols(), 1);
  EXPECT_EQ(g.rows(), 4);
}

TEST(PatchGrid, InvalidArguments) {
  EXPECT_THROW(make_patch_grid(0, 5, 4, 2), Error);
  EXPECT_THROW(make_patch_grid(5, 5, 4, 5), Error);
  EXPECT_THROW(make_patch_grid(5, 5, 0, 1), Error);
}

TEST(PatchGrid, OriginsRowMajor) {
  const auto o = make_patch_grid(40, 40, 32, 8).origins();
  ASSERT_EQ(o.size(), 4u);
  EXPECT_EQ(o[1], (PatchOrigin{8, 0}));
  EXPECT_EQ(o[2], (PatchOrigin{0, 8}));
}

TEST(PatchGrid, CoverageMatchesBruteForceProperty) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = std::uniform_int_distribution<int>(1, 90)(rng);
    const int h = std::uniform_int_distribution<int>(1, 90)(rng);
    const int patch = std::uniform_int_distribution<int>(1, 40)(rng);
    const int stride = std::uniform_int_distribution<int>(1, patch)(rng);
    const PatchGrid g(w, h, patch, stride);
    const auto xs = oracle::axis_origins(w, patch, stride);
    const auto ys = oracle::axis_origins(h, patch, stride);
    ASSERT_EQ(g.cols(), static_cast<int>(xs.size()));
    ASSERT_EQ(g.rows(), static_cast<int>(ys.size()));
    const int max_cover = (patch + stride - 1) / stride;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int count = 0;
        for (int oy : ys)
          for (int ox : xs) count += ox <= x && x < ox + patch && oy <= y && y < oy + patch;
        const auto [c0, c1] = g.covering_cols(x);
        const auto [r0, r1] = g.covering_rows(y);
        ASSERT_GE(count, 1);
        ASSERT_LE(count, max_cover * max_cover);
        ASSERT_EQ(count, (c1 - c0 + 1) * (r1 - r0 + 1));
      }
  }
}

TEST(Lanczos, IdentityScale) {
  std::mt19937 rng(11);
  const Raster r = oracle::random_raster(rng, 13, 9);
  const Raster out = lanczos_resize(r, 13, 9);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(out[i], r[i], 1e-6);
}

TEST(Lanczos, ConstantStaysConstantAtAnySize) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const float c = std::uniform_real_distribution<float>(0, 1)(rng);
    const int w = std::uniform_int_distribution<int>(1, 20)(rng);
    const int h = std::uniform_int_distribution<int>(1, 20)(rng);
    const int ow = std::uniform_int_distribution<int>(1, 60)(rng);
    const int oh = std::uniform_int_distribution<int>(1, 60)(rng);
    const Raster out = lanczos_resize(Raster(w, h, c), ow, oh);
    for (float v : out.data()) ASSERT_NEAR(v, c, 1e-5);
  }
}

TEST(Lanczos, CheckerboardUpThenBoxDownKeepsMean) {
  Raster r(2, 2, std::vector<float>{0.0f, 1.0f, 1.0f, 0.0f});
  const Raster up = lanczos_resize(r, 8, 8);
  Raster down(2, 2);
  for (int by = 0; by < 2; ++by)
    for (int bx = 0; bx < 2; ++bx) {
      double s = 0;
      for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) s += up(bx * 4 + x, by * 4 + y);
      down(bx, by) = static_cast<float>(s / 16);
    }
  double mean_in = 0.5, mean_out = 0;
  for (float v : down.data()) mean_out += v / 4.0;
  EXPECT_NEAR(mean_out, mean_in, 1e-2);
}

TEST(Lanczos, OutputClampedToUnitRange) {
  // A sharp step rings; clamping keeps values in [0,1].
  Raster r(6, 1, std::vector<float>{0, 0, 0, 1, 1, 1});
  const Raster up = lanczos_resize(r, 60, 1);
  for (float v : up.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(ScoreMapFile, RoundTripIsBitExact) {
  std::mt19937 rng(17);
  ScoreMap m = retag<ScoreMap>(oracle::random_raster(rng, 17, 5));
  m[0] = 0.0f;
  m[1] = 1.0f;
  const auto path = temp_path("roundtrip.smap");
  save_scoremap(m, path);
  const ScoreMap back = load_scoremap(path);
  ASSERT_EQ(back.width(), 17);
  ASSERT_EQ(back.height(), 5);
  for (std::size_t i = 0; i < m.size(); ++i)
    ASSERT_EQ(std::bit_cast<std::uint32_t>(back[i]), std::bit_cast<std::uint32_t>(m[i]));
}

TEST(ScoreMapFile, TwoByTwoLayout) {
  ScoreMap m(2, 2, std::vector<float>{0.0f, 0.5f, 0.25f, 1.0f});
  const Bytes b = encode_smap(m);
  ASSERT_EQ(b.size(), 13u + 16u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "SMAP");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 2);  // width LE
  EXPECT_EQ(b[9], 2);  // height LE
  // 0.5f = 0x3F000000 little-endian at payload offset 4
  EXPECT_EQ(b[13 + 4 + 3], 0x3F);
  EXPECT_EQ(b[13 + 4 + 2], 0x00);
}

TEST(ScoreMapFile, BadMagicIsFormatError) {
  ScoreMap m(2, 1, 0.5f);
  Bytes b = encode_smap(m);
  b[0] = b[1] = b[2] = b[3] = 'X';
  try {
    decode_smap(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
  }
}

TEST(ScoreMapFile, BadVersionAndTruncationAreFormatErrors) {
  ScoreMap m(3, 2, 0.5f);
  Bytes b = encode_smap(m);
  Bytes v = b;
  v[4] = 2;
  EXPECT_THROW(decode_smap(v), Error);
  for (std::size_t cut : {0u, 3u, 10u, 20u, 28u}) {
    Bytes t(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
    try {
      decode_smap(t);
      FAIL() << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Format);
    }
  }
  Bytes extra = b;
  extra.push_back(0);
  EXPECT_THROW(decode_smap(extra), Error);
}

TEST(ScoreMapFile, NaNIsDataError) {
  ScoreMap m(2, 1, 0.5f);
  Bytes b = encode_smap(m);
  const auto nan = std::bit_cast<std::uint32_t>(std::nanf(""));
  for (int i = 0; i < 4; ++i) b[13 + i] = static_cast<std::uint8_t>(nan >> (8 * i));
  try {
    decode_smap(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

TEST(ScoreMapFile, SaveRejectsOutOfRange) {
  ScoreMap m(1, 1, 1.5f);
  EXPECT_THROW(save_scoremap(m, temp_path("bad.smap")), Error);
}

TEST(ImageFiles, PngRoundTripsEightBitValues) {
  Raster r(7, 3);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<float>((i * 37) % 256) / 255.0f;
  const auto path = temp_path("gray.png");
  save_png(r, path);
  const ColorImage back = load_image(path);
  ASSERT_EQ(back.channels, 1);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(back.data[i], r[i]);

  ColorImage rgb{2, 2, 3, {0, 0.2f, 1, 1, 1, 1, 0, 0, 0, 0.4f, 0.6f, 0.8f}};
  for (float& v : rgb.data) v = std::round(v * 255.0f) / 255.0f;
  save_png(rgb, temp_path("rgb.png"));
  EXPECT_EQ(load_image(temp_path("rgb.png")).data, rgb.data);
}

TEST(ImageFiles, MaskNonzeroIsCrack) {
  Raster r(3, 1, std::vector<float>{0.0f, 1.0f / 255.0f, 1.0f});
  save_png(r, temp_path("mask.png"));
  const BinaryMask m = load_mask(temp_path("mask.png"));
  EXPECT_EQ(std::vector<std::uint8_t>(m.data().begin(), m.data().end()), (std::vector<std::uint8_t>{0, 1, 1}));
}

TEST(ImageFiles, JpegDecodes) {
  const ColorImage jpg = load_image(fs::path(WEAKSEG_FIXTURES) / "crack.jpg");
  const ColorImage png = load_image(fs::path(WEAKSEG_FIXTURES) / "crack.png");
  ASSERT_EQ(jpg.width, png.width);
  ASSERT_EQ(jpg.height, png.height);
  ASSERT_EQ(jpg.channels, 3);
  double diff = 0;
  for (std::size_t i = 0; i < png.data.size(); ++i) diff += std::abs(jpg.data[i] - png.data[i]);
  EXPECT_LT(diff / static_cast<double>(png.data.size()), 0.02);
}

TEST(ImageFiles, UnknownFormatAndMissingFile) {
  const auto path = temp_path("junk.png");
  write_file_atomic(path, Bytes{'n', 'o', 'p', 'e'});
  try {
    load_image(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
  }
  EXPECT_THROW(load_image(temp_path("does_not_exist.png")), Error);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (int workers : {1, 3, 8}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, workers);
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 1000);
  }
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(
                   100, [](std::size_t i) {
                     if (i == 57) throw Error(ErrorKind::Data, "boom");
                   },
                   4),
               Error);
}

TEST(ParallelFor, NestedCallsRunInline) {
  std::vector<int> hits(64, 0);
  parallel_for(8, [&](std::size_t i) { parallel_for(8, [&](std::size_t j) { hits[i * 8 + j]++; }, 4); }, 4);
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 64);
}
