#include <gtest/gtest.h>

#include <random>

#include "bcd/error.hpp"
#include "bcd/filters.hpp"
#include "bcd/mbi.hpp"
#include "oracles.hpp"

namespace bcd {
namespace {

constexpr LineDirection kDirections[] = {LineDirection::k0, LineDirection::k45,
                                         LineDirection::k90, LineDirection::k135};

// 64x64: an 8x8 block at (8, 40) and a 2-pixel-wide horizontal line at rows
// 16..17 spanning columns 8..55.
Band line_and_block() {
  Band b(64, 64, 0.0f);
  for (int y = 40; y < 48; ++y) {
    for (int x = 8; x < 16; ++x) b(x, y) = 100.0f;
  }
  for (int y = 16; y < 18; ++y) {
    for (int x = 8; x < 56; ++x) b(x, y) = 100.0f;
  }
  return b;
}

double region_mean(std::span<const float> v, int width, int x0, int y0, int x1, int y1) {
  double s = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) s += v[static_cast<std::size_t>(y) * width + x];
  }
  return s / ((x1 - x0) * (y1 - y0));
}

TEST(LineOffsets, Shapes) {
  using P = std::pair<int, int>;
  EXPECT_EQ(line_offsets(3, LineDirection::k0), (std::vector<P>{{-1, 0}, {0, 0}, {1, 0}}));
  EXPECT_EQ(line_offsets(2, LineDirection::k90), (std::vector<P>{{0, 0}, {0, 1}}));
  EXPECT_EQ(line_offsets(3, LineDirection::k45), (std::vector<P>{{-1, 1}, {0, 0}, {1, -1}}));
  EXPECT_EQ(line_offsets(3, LineDirection::k135), (std::vector<P>{{1, 1}, {0, 0}, {-1, -1}}));
}

TEST(Morphology, MatchesNaiveOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Band in = oracle::random_band(rng, 29, 23, 50);
    for (int len : {1, 2, 3, 8, 13}) {
      for (auto d : kDirections) {
        ASSERT_EQ(erode_linear(in, len, d), oracle::erode(in, len, d));
        ASSERT_EQ(dilate_linear(in, len, d), oracle::dilate(in, len, d));
      }
    }
  }
}

TEST(Morphology, OpeningIsAntiExtensiveAndIdempotent) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    const Band in = oracle::random_band(rng, 31, 27, 256);
    for (int len : {2, 3, 8, 18}) {
      for (auto d : kDirections) {
        const Band once = open_linear(in, len, d);
        ASSERT_EQ(open_linear(once, len, d), once);
        for (std::size_t i = 0; i < in.size(); ++i) ASSERT_LE(once.values()[i], in.values()[i]);
        const Band top_hat = white_top_hat_linear(in, len, d);
        for (float v : top_hat.values()) ASSERT_GE(v, 0.0f);
      }
    }
  }
}

TEST(Morphology, OpeningIsIncreasing) {
  std::mt19937_64 rng(23);
  const Band a = oracle::random_band(rng, 20, 20, 100);
  Band b = a;
  for (float& v : b.values()) v += 1.0f;
  b(3, 4) += 50.0f;
  for (auto d : kDirections) {
    const Band oa = open_linear(a, 5, d);
    const Band ob = open_linear(b, 5, d);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_LE(oa.values()[i], ob.values()[i]);
  }
}

TEST(WhiteTopHat, ConstantIsZero) {
  const Band in(12, 12, 9.0f);
  for (auto d : kDirections) EXPECT_EQ(white_top_hat_linear(in, 5, d), Band(12, 12, 0.0f));
}

TEST(WhiteTopHat, IsolatedPeakSurvives) {
  const Band in(7, 1, {0, 0, 0, 9, 0, 0, 0});
  EXPECT_EQ(white_top_hat_linear(in, 3, LineDirection::k0)(3, 0), 9.0f);
}

TEST(WhiteTopHat, LineAlongElementIsKept) {
  const Band img = line_and_block();
  const Band th = white_top_hat_linear(img, 13, LineDirection::k0);
  for (int x = 8; x < 56; ++x) EXPECT_EQ(th(x, 16), 0.0f);
  const Band across = white_top_hat_linear(img, 13, LineDirection::k90);
  for (int x = 8; x < 56; ++x) EXPECT_EQ(across(x, 16), 100.0f);
}

TEST(WhiteTopHat, ElementLongerThanSpan) {
  const Band in(10, 4, 0.0f);
  EXPECT_NO_THROW(white_top_hat_linear(in, 10, LineDirection::k0));
  EXPECT_THROW(white_top_hat_linear(in, 11, LineDirection::k0), ValidationError);
  EXPECT_THROW(white_top_hat_linear(in, 5, LineDirection::k90), ValidationError);
  EXPECT_THROW(white_top_hat_linear(in, 5, LineDirection::k45), ValidationError);
}

TEST(MbiParams, DefaultsAndValidation) {
  EXPECT_EQ(MbiParams{}.scales(), (std::vector<int>{3, 8, 13, 18, 23}));
  EXPECT_EQ(MbiParams{}.direction_set().size(), 4u);
  EXPECT_THROW((MbiParams{4, 10, 5, 1}.validate()), ValidationError);
  EXPECT_THROW((MbiParams{0, 3, 24, 5}.validate()), ValidationError);
  EXPECT_THROW((MbiParams{4, 3, 24, 0}.validate()), ValidationError);
}

TEST(Mbi, ConstantImageIsZero) {
  RasterImage img(30, 30, {"a"}, std::vector<float>(900, 3.0f));
  const FeatureMap fm = mbi(img);
  for (float v : fm.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Mbi, BlockFixtureMatchesOracleMorphology) {
  Band block(64, 64, 0.0f);
  for (int y = 28; y < 36; ++y) {
    for (int x = 28; x < 36; ++x) block(x, y) = 100.0f;
  }
  const FeatureMap fm = mbi(RasterImage({"pan"}, {block}));

  // Oracle pipeline built from the naive erosion/dilation.
  const MbiParams p;
  std::vector<std::vector<double>> features;
  for (int s : p.scales()) {
    std::vector<double> f(block.size(), 0.0);
    for (auto d : kDirections) {
      const Band opened = oracle::dilate(oracle::erode(block, s, d), s, d);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] += block.values()[i] - opened.values()[i];
    }
    for (double& v : f) v /= 4.0;
    features.push_back(f);
  }
  std::vector<double> mean(block.size(), 0.0);
  for (std::size_t k = 0; k + 1 < features.size(); ++k) {
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean[i] += std::abs(features[k + 1][i] - features[k][i]);
    }
  }
  double hi = 0;
  for (double& v : mean) hi = std::max(hi, v = static_cast<float>(v / 4.0));
  for (std::size_t i = 0; i < mean.size(); ++i) {
    ASSERT_NEAR(fm.values()[i], mean[i] / hi, 1e-6);
  }

  EXPECT_GT(region_mean(fm.values(), 64, 28, 28, 36, 36), 0.5);
  EXPECT_EQ(fm(2, 2), 0.0f);
}

TEST(Mbi, LineSuppressedRelativeToMfbi) {
  const RasterImage img({"pan"}, {line_and_block()});
  const FeatureMap m = mbi(img);
  const FeatureMap f = mfbi(img);
  const double mbi_line = region_mean(m.values(), 64, 8, 16, 56, 18);
  const double mfbi_line = region_mean(f.values(), 64, 8, 16, 56, 18);
  EXPECT_LT(mbi_line, mfbi_line);
  // Both indices still see the block.
  EXPECT_GT(region_mean(m.values(), 64, 8, 40, 16, 48), mbi_line);
  EXPECT_GT(region_mean(f.values(), 64, 8, 40, 16, 48), 0.25);
}

}  // namespace
}  // namespace bcd
