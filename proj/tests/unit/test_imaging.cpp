#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "surgscan/imaging.hpp"
#include "surgscan/imaging_reference.hpp"
#include "test_support.hpp"

using namespace surgscan;
using imaging::Raster;
using imaging::Rgb;
using surgscan::testkit::random_raster;

namespace {

Raster constant(int w, int h, std::uint8_t v) { return Raster(w, h, Rgb{v, v, v}); }

std::uint8_t oracle_round(double v) {
  if (v < 0) return 0;
  if (v > 255) return 255;
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

}  // namespace

TEST(Raster, RejectsBadDimensions) {
  EXPECT_THROW(Raster(0, 5), Error);
  EXPECT_THROW(Raster(3, 3, std::vector<std::uint8_t>(10)), Error);
}

TEST(Crop, PixelEquality) {
  const Raster img = random_raster(37, 23, 1);
  const PixelBBox region{5, 3, 30, 20};
  const Raster out = imaging::crop(img, region);
  ASSERT_EQ(out.width(), 25);
  ASSERT_EQ(out.height(), 17);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) EXPECT_EQ(out.at(x, y), img.at(x + 5, y + 3));
  }
}

TEST(Crop, RejectsRegionsOutsideFrame) {
  const Raster img = random_raster(10, 10, 2);
  EXPECT_THROW(imaging::crop(img, {0, 0, 11, 5}), Error);
  EXPECT_THROW(imaging::crop(img, {4, 4, 4, 8}), Error);
}

TEST(FixedRotation, CornersMoveClockwise) {
  Raster img(5, 3);
  const Rgb tl{255, 0, 0}, tr{0, 255, 0}, br{0, 0, 255}, bl{255, 255, 0};
  img.set(0, 0, tl);
  img.set(4, 0, tr);
  img.set(4, 2, br);
  img.set(0, 2, bl);

  const Raster r90 = imaging::rotate_fixed(img, 90);
  ASSERT_EQ(r90.width(), 3);
  ASSERT_EQ(r90.height(), 5);
  EXPECT_EQ(r90.at(2, 0), tl);  // top-left ends top-right
  EXPECT_EQ(r90.at(2, 4), tr);
  EXPECT_EQ(r90.at(0, 4), br);
  EXPECT_EQ(r90.at(0, 0), bl);

  const Raster r180 = imaging::rotate_fixed(img, 180);
  EXPECT_EQ(r180.at(4, 2), tl);
  EXPECT_EQ(r180.at(0, 0), br);

  const Raster r270 = imaging::rotate_fixed(img, 270);
  ASSERT_EQ(r270.width(), 3);
  EXPECT_EQ(r270.at(0, 4), tl);  // top-left ends bottom-left
  EXPECT_EQ(r270.at(0, 0), tr);
}

TEST(FixedRotation, GroupLaws) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Raster img = random_raster(7 + static_cast<int>(seed % 5), 4 + static_cast<int>(seed % 3), seed);
    Raster r = img;
    for (int i = 0; i < 4; ++i) r = imaging::rotate_fixed(r, 90);
    EXPECT_EQ(r, img);
    EXPECT_EQ(imaging::rotate_fixed(imaging::rotate_fixed(img, 180), 180), img);
    EXPECT_EQ(imaging::rotate_fixed(imaging::rotate_fixed(img, 90), 90), imaging::rotate_fixed(img, 180));
    EXPECT_EQ(imaging::rotate_fixed(imaging::rotate_fixed(img, 90), 270), img);
  }
}

TEST(FixedRotation, RejectsOtherAngles) {
  const Raster img = random_raster(4, 4, 3);
  for (int a : {0, 45, 360, -90}) {
    try {
      imaging::rotate_fixed(img, a);
      FAIL() << a;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidAngle);
    }
  }
}

TEST(ArbitraryRotation, ZeroIsIdentity) {
  const Raster img = random_raster(16, 9, 4);
  EXPECT_EQ(imaging::rotate_arbitrary(img, 0.0), img);
}

TEST(ArbitraryRotation, MatchesInverseMappingOracle) {
  const Raster img = random_raster(21, 15, 5);
  const double deg = 17.0;
  const Rgb fill{1, 2, 3};
  const Raster out = imaging::rotate_arbitrary(img, deg, fill);
  const double t = deg * std::numbers::pi / 180.0;
  const double cx = 10.0, cy = 7.0;
  for (int y = 0; y < 15; ++y) {
    for (int x = 0; x < 21; ++x) {
      // the destination pixel pulls from the source rotated back counter-clockwise
      const std::complex<double> d(x - cx, y - cy);
      const std::complex<double> s = d * std::polar(1.0, -t);
      const double sx = s.real() + cx, sy = s.imag() + cy;
      if (sx < -1e-6 || sy < -1e-6 || sx > 20 + 1e-6 || sy > 14 + 1e-6) {
        if (sx < -1e-3 || sy < -1e-3 || sx > 20.001 || sy > 14.001) {
          EXPECT_EQ(out.at(x, y), fill);
        }
        continue;
      }
      const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, 20);
      const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, 14);
      const int x1 = std::min(x0 + 1, 20), y1 = std::min(y0 + 1, 14);
      const double fx = std::clamp(sx, 0.0, 20.0) - x0, fy = std::clamp(sy, 0.0, 14.0) - y0;
      const Rgb a = img.at(x0, y0), b = img.at(x1, y0), c = img.at(x0, y1), e = img.at(x1, y1);
      auto lerp = [&](std::uint8_t p, std::uint8_t q, std::uint8_t r, std::uint8_t s2) {
        return (1 - fy) * ((1 - fx) * p + fx * q) + fy * ((1 - fx) * r + fx * s2);
      };
      const Rgb got = out.at(x, y);
      EXPECT_NEAR(got.r, lerp(a.r, b.r, c.r, e.r), 0.5 + 1e-6) << x << "," << y;
      EXPECT_NEAR(got.g, lerp(a.g, b.g, c.g, e.g), 0.5 + 1e-6) << x << "," << y;
      EXPECT_NEAR(got.b, lerp(a.b, b.b, c.b, e.b), 0.5 + 1e-6) << x << "," << y;
    }
  }
}

TEST(ArbitraryRotation, PositiveAnglesTurnClockwiseOnScreen) {
  Raster img(41, 41);
  img.set(30, 20, {255, 255, 255});  // 10 px right of center
  const Raster out = imaging::rotate_arbitrary(img, 30.0);
  int best_x = 0, best_y = 0, best = -1;
  for (int y = 0; y < 41; ++y) {
    for (int x = 0; x < 41; ++x) {
      if (out.at(x, y).r > best) {
        best = out.at(x, y).r;
        best_x = x;
        best_y = y;
      }
    }
  }
  // clockwise with y pointing down moves the marker below the center line
  EXPECT_NEAR(best_x, 20 + 10 * std::cos(std::numbers::pi / 6), 1.0);
  EXPECT_NEAR(best_y, 20 + 10 * std::sin(std::numbers::pi / 6), 1.0);
}

TEST(ArbitraryRotation, CornersTakeFillAndRangeIsChecked) {
  const Raster img = constant(20, 20, 100);
  const Raster out = imaging::rotate_arbitrary(img, 45.0, {7, 7, 7});
  EXPECT_EQ(out.at(0, 0), (Rgb{7, 7, 7}));
  EXPECT_EQ(out.at(10, 10), (Rgb{100, 100, 100}));
  EXPECT_THROW(imaging::rotate_arbitrary(img, 46.0), Error);
  EXPECT_THROW(imaging::rotate_arbitrary(img, std::nan("")), Error);
}

TEST(Noise, StatisticsOnConstantField) {
  const Raster img = constant(1000, 1000, 128);
  const Raster out = imaging::add_gaussian_noise(img, 10.0, 42);
  double sum = 0, sq = 0;
  for (auto v : out.data()) sum += v;
  const double n = static_cast<double>(out.data().size());
  const double mean = sum / n;
  for (auto v : out.data()) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / n);
  EXPECT_GE(mean, 127.9);
  EXPECT_LE(mean, 128.1);
  EXPECT_GE(sd, 9.8);
  EXPECT_LE(sd, 10.2);
}

TEST(Noise, SeededAndZeroSigmaIdentity) {
  const Raster img = random_raster(50, 40, 6);
  EXPECT_EQ(imaging::add_gaussian_noise(img, 5.0, 9), imaging::add_gaussian_noise(img, 5.0, 9));
  EXPECT_NE(imaging::add_gaussian_noise(img, 5.0, 9), imaging::add_gaussian_noise(img, 5.0, 10));
  EXPECT_EQ(imaging::add_gaussian_noise(img, 0.0, 9), img);
  EXPECT_THROW(imaging::add_gaussian_noise(img, -1.0, 9), Error);
}

TEST(GaussianKernel, NormalizedSymmetricTruncated) {
  for (double r : {0.5, 1.0, 2.0, 3.3}) {
    const auto k = imaging::gaussian_kernel(r);
    const int half = static_cast<int>(std::ceil(3 * r));
    ASSERT_EQ(static_cast<int>(k.size()), 2 * half + 1);
    double s = 0;
    for (double v : k) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
    for (int i = 0; i < half; ++i) EXPECT_DOUBLE_EQ(k[i], k[k.size() - 1 - i]);
    EXPECT_NEAR(k[half + 1] / k[half], std::exp(-1.0 / (2 * r * r)), 1e-12);
  }
}

TEST(Unsharp, FlatFieldIsIdentity) {
  for (std::uint8_t v : {0, 1, 77, 128, 254, 255}) {
    const Raster img = constant(31, 17, v);
    EXPECT_EQ(imaging::unsharp_mask(img, 2.0, 1.0), img);
    EXPECT_EQ(imaging::unsharp_mask(img, 0.7, 3.5), img);
  }
}

TEST(Unsharp, ZeroAmountIsIdentity) {
  const Raster img = random_raster(20, 20, 7);
  EXPECT_EQ(imaging::unsharp_mask(img, 2.0, 0.0), img);
}

TEST(Unsharp, StepEdgeMatchesOneDimensionalConvolution) {
  // columns are constant, so the vertical pass is exact and the result is a
  // 1-D convolution across the step with clamped borders
  const int w = 40, h = 9;
  Raster img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t v = x < 20 ? 50 : 200;
      img.set(x, y, {v, v, v});
    }
  }
  const double radius = 2.0, amount = 1.0;
  const Raster out = imaging::unsharp_mask(img, radius, amount);

  const int half = static_cast<int>(std::ceil(3 * radius));
  std::vector<long double> taps;
  long double total = 0;
  for (int k = -half; k <= half; ++k) {
    taps.push_back(std::exp(-static_cast<long double>(k * k) / (2 * radius * radius)));
    total += taps.back();
  }
  for (int x = 0; x < w; ++x) {
    long double blur = 0;
    for (int k = -half; k <= half; ++k) {
      const int sx = std::clamp(x + k, 0, w - 1);
      blur += taps[k + half] / total * (sx < 20 ? 50 : 200);
    }
    const double v = x < 20 ? 50 : 200;
    const std::uint8_t expected = oracle_round(static_cast<double>(v + amount * (v - blur)));
    for (int y = 0; y < h; ++y) EXPECT_EQ(out.at(x, y).g, expected) << "x=" << x;
  }
  // overshoot on both sides of the edge
  EXPECT_LT(out.at(19, 0).r, 50);
  EXPECT_GT(out.at(20, 0).r, 200);
}

TEST(Unsharp, RejectsBadParameters) {
  const Raster img = random_raster(8, 8, 8);
  EXPECT_THROW(imaging::unsharp_mask(img, 0.0, 1.0), Error);
  EXPECT_THROW(imaging::unsharp_mask(img, 1.0, -0.1), Error);
}

TEST(BrightnessContrast, MatchesPointFormula) {
  const Raster img = random_raster(30, 30, 9);
  for (auto [b, c] : {std::pair{0.15, -0.1}, std::pair{-0.2, 0.2}, std::pair{0.0, 0.0}}) {
    const Raster out = imaging::adjust_brightness_contrast(img, b, c);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
      const double v = img.data()[i];
      EXPECT_EQ(out.data()[i], oracle_round((v * (1 + b) - 128) * (1 + c) + 128));
    }
  }
  EXPECT_EQ(imaging::adjust_brightness_contrast(img, 0.0, 0.0), img);
  EXPECT_THROW(imaging::adjust_brightness_contrast(img, 1.0, 0.0), Error);
  EXPECT_THROW(imaging::adjust_brightness_contrast(img, 0.0, -1.5), Error);
}

TEST(Resize, OutputSizeKeepsAspect) {
  EXPECT_EQ(imaging::aspect_preserving_size(1600, 1200, 640), std::make_pair(640, 480));
  EXPECT_EQ(imaging::aspect_preserving_size(1200, 1600, 640), std::make_pair(480, 640));
  EXPECT_EQ(imaging::aspect_preserving_size(1600, 1600, 640), std::make_pair(640, 640));
  EXPECT_EQ(imaging::aspect_preserving_size(1000, 333, 640), std::make_pair(640, 213));
  EXPECT_EQ(imaging::aspect_preserving_size(1000, 1, 640), std::make_pair(640, 1));
  EXPECT_EQ(imaging::aspect_preserving_size(3, 1, 2), std::make_pair(2, 1));
  EXPECT_EQ(imaging::aspect_preserving_size(100, 50, 300), std::make_pair(300, 150));
  EXPECT_THROW(imaging::aspect_preserving_size(10, 10, 0), Error);
}

TEST(Resize, ConstantStaysConstantAndSameSizeIsCopy) {
  const Raster flat = constant(97, 61, 140);
  const Raster small = imaging::resize_preserve_aspect(flat, 40);
  EXPECT_EQ(small, constant(40, 25, 140));
  const Raster img = random_raster(64, 32, 10);
  EXPECT_EQ(imaging::resize_preserve_aspect(img, 64), img);
}

TEST(Resize, HalvingAveragesPixelPairs) {
  // with half-pixel centers a 2x downscale samples exactly between two pixels
  Raster img(4, 2);
  for (int x = 0; x < 4; ++x) {
    const std::uint8_t v = static_cast<std::uint8_t>(x * 60);
    img.set(x, 0, {v, v, v});
    img.set(x, 1, {v, v, v});
  }
  const Raster out = imaging::resize_preserve_aspect(img, 2);
  ASSERT_EQ(out.width(), 2);
  EXPECT_EQ(out.at(0, 0).r, 30);
  EXPECT_EQ(out.at(1, 0).r, 150);
}

class SerialParallel : public ::testing::TestWithParam<int> {};

TEST_P(SerialParallel, BitIdentical) {
  const int threads = GetParam();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Raster img = random_raster(73 + static_cast<int>(seed), 41, seed + 100);
    namespace ref = imaging::reference;
    EXPECT_EQ(imaging::resize_preserve_aspect(img, 50), ref::resize_preserve_aspect(img, 50));
    EXPECT_EQ(imaging::resize_preserve_aspect(img, 130), ref::resize_preserve_aspect(img, 130));
    EXPECT_EQ(imaging::adjust_brightness_contrast(img, 0.1, -0.15), ref::adjust_brightness_contrast(img, 0.1, -0.15));
    EXPECT_EQ(imaging::add_gaussian_noise(img, 10.0, seed), ref::add_gaussian_noise(img, 10.0, seed));
    EXPECT_EQ(imaging::unsharp_mask(img, 2.0, 1.0), ref::unsharp_mask(img, 2.0, 1.0));
    for (int a : {90, 180, 270}) EXPECT_EQ(imaging::rotate_fixed(img, a), ref::rotate_fixed(img, a));
    EXPECT_EQ(imaging::rotate_arbitrary(img, -12.5, {9, 9, 9}), ref::rotate_arbitrary(img, -12.5, {9, 9, 9}));
  }
  omp_set_num_threads(saved);
}

INSTANTIATE_TEST_SUITE_P(Threads, SerialParallel, ::testing::Values(1, 2, 4, 7));

TEST(AugmentParams, Validation) {
  imaging::AugmentParams p;
  EXPECT_NO_THROW(p.validate());
  p.fixed_rotations = {90, 45};
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.random_rotation_range = 50;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.noise_sigma = -1;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.brightness_delta = 1.0;
  EXPECT_THROW(p.validate(), Error);
}
