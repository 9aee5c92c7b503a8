#include <gtest/gtest.h>

#include <cstdlib>
#include <string>

#include "surgscan/codec.hpp"
#include "test_support.hpp"

using namespace surgscan;
using namespace surgscan::imaging;

namespace {

Errc decode_error(std::span<const std::uint8_t> bytes) {
  try {
    decode_image(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Codec, PngRoundTripIsLossless) {
  const Raster img = testkit::random_raster(33, 17, 11);
  const auto bytes = encode_png(img);
  EXPECT_EQ(sniff_format(bytes), ImageFormat::Png);
  EXPECT_EQ(decode_image(bytes), img);
}

TEST(Codec, JpegRoundTripIsClose) {
  Raster img(40, 30);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      img.set(x, y, {static_cast<std::uint8_t>(x * 6), static_cast<std::uint8_t>(y * 8), 120});
    }
  }
  const auto bytes = encode_jpeg(img, 98);
  EXPECT_EQ(sniff_format(bytes), ImageFormat::Jpeg);
  const Raster back = decode_image(bytes);
  ASSERT_EQ(back.width(), 40);
  ASSERT_EQ(back.height(), 30);
  double err = 0;
  for (std::size_t i = 0; i < img.data().size(); ++i) err += std::abs(img.data()[i] - back.data()[i]);
  EXPECT_LT(err / static_cast<double>(img.data().size()), 3.0);
}

TEST(Codec, RejectsNonImages) {
  const std::string text = "this is a text file, not an image\n";
  const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
  EXPECT_EQ(sniff_format(bytes), ImageFormat::Unknown);
  EXPECT_EQ(decode_error(bytes), Errc::BadImage);
  EXPECT_EQ(decode_error({}), Errc::BadImage);
}

TEST(Codec, RejectsTruncatedImages) {
  const Raster img = testkit::random_raster(30, 30, 12);
  auto png = encode_png(img);
  png.resize(png.size() / 2);
  EXPECT_EQ(decode_error(png), Errc::BadImage);
  auto jpg = encode_jpeg(img);
  jpg.resize(20);
  EXPECT_EQ(decode_error(jpg), Errc::BadImage);
}

TEST(Codec, FileHelpers) {
  testkit::TempDir dir;
  const Raster img = testkit::random_raster(9, 5, 13);
  save_png(img, dir / "a.png");
  EXPECT_EQ(load_image(dir / "a.png"), img);
  EXPECT_THROW(load_image(dir / "missing.png"), Error);
  const std::vector<std::uint8_t> blob{1, 2, 3, 255};
  write_file_bytes(dir / "blob.bin", blob);
  EXPECT_EQ(read_file_bytes(dir / "blob.bin"), blob);
}
