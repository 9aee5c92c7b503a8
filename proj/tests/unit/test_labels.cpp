#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "surgscan/dataset/labels.hpp"
#include "test_support.hpp"

using namespace surgscan;
using namespace surgscan::dataset;

TEST(Labels, GoldenLine) {
  const auto n = to_normalized({400, 400, 800, 1200}, 2, 1600, 1600);
  EXPECT_EQ(format_label_line(n), "2 0.375000 0.500000 0.250000 0.500000");
}

TEST(Labels, NormalizationArithmetic) {
  const auto n = to_normalized({10, 20, 50, 100}, 0, 200, 400);
  EXPECT_DOUBLE_EQ(n.cx, 30.0 / 200);
  EXPECT_DOUBLE_EQ(n.cy, 60.0 / 400);
  EXPECT_DOUBLE_EQ(n.w, 40.0 / 200);
  EXPECT_DOUBLE_EQ(n.h, 80.0 / 400);
}

TEST(Labels, FullFrameBox) {
  const auto n = to_normalized({0, 0, 640, 480}, 1, 640, 480);
  EXPECT_EQ(format_label_line(n), "1 0.500000 0.500000 1.000000 1.000000");
  EXPECT_EQ(from_normalized(n, 640, 480), (PixelBBox{0, 0, 640, 480}));
}

TEST(Labels, RoundTripOfRandomBoxes) {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 1000; ++i) {
    const int w = 1 + static_cast<int>(gen() % 4000);
    const int h = 1 + static_cast<int>(gen() % 4000);
    const int x0 = static_cast<int>(gen() % w);
    const int y0 = static_cast<int>(gen() % h);
    const int x1 = x0 + 1 + static_cast<int>(gen() % (w - x0));
    const int y1 = y0 + 1 + static_cast<int>(gen() % (h - y0));
    const PixelBBox box{x0, y0, x1, y1};
    const int cls = static_cast<int>(gen() % 6);
    const auto parsed = parse_labels(format_label_line(to_normalized(box, cls, w, h)) + "\n");
    ASSERT_EQ(parsed.size(), 1u);
    EXPECT_EQ(parsed[0].class_id, cls);
    const PixelBBox back = from_normalized(parsed[0], w, h);
    EXPECT_LE(std::abs(back.x_min - x0), 0.5) << w << "x" << h;
    EXPECT_LE(std::abs(back.y_min - y0), 0.5);
    EXPECT_LE(std::abs(back.x_max - x1), 0.5);
    EXPECT_LE(std::abs(back.y_max - y1), 0.5);
  }
}

TEST(Labels, RoundedEdgesStayInsideFrame) {
  // centre and width round up independently, pushing the right edge past 1
  const NormalizedBBox n{0, 0.8999996, 0.5, 0.2000008, 0.2};
  const auto parsed = parse_labels(format_label_line(n));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_FALSE(normalized_bbox_violation(parsed[0]).has_value());
}

TEST(Labels, TinyBoxKeepsOnePixel) {
  const NormalizedBBox n{0, 0.5, 0.5, 0.0001, 0.0001};
  const PixelBBox b = from_normalized(n, 100, 100);
  EXPECT_EQ(b.width(), 1);
  EXPECT_EQ(b.height(), 1);
}

TEST(Labels, FormatRejectsInvalidRecords) {
  EXPECT_THROW(format_label_line({0, 0.5, 0.5, 0.0, 0.2}), Error);
  EXPECT_THROW(to_normalized({0, 0, 10, 10}, -1, 100, 100), Error);
  EXPECT_THROW(to_normalized({0, 0, 101, 10}, 0, 100, 100), Error);
}

TEST(LabelParser, BlankLinesAreSkippedButCounted) {
  const auto r = parse_labels("\n0 0.5 0.5 0.2 0.2\n   \n1 0.25 0.25 0.1 0.1");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[1].class_id, 1);
  try {
    parse_labels("0 0.5 0.5 0.2 0.2\n\n0 0.5 0.5 0.2\n");
    FAIL();
  } catch (const LabelParseError& e) {
    EXPECT_EQ(e.code(), Errc::MalformedLine);
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(LabelParser, MalformedFields) {
  for (const char* bad : {"0 0.5 0.5 0.2 0.2 9", "x 0.5 0.5 0.2 0.2", "0 0.5 abc 0.2 0.2", "1.5 0.5 0.5 0.2 0.2",
                          "0 0.5 0.5 0.2 inf"}) {
    try {
      parse_labels(bad);
      FAIL() << bad;
    } catch (const LabelParseError& e) {
      EXPECT_EQ(e.code(), Errc::MalformedLine) << bad;
      EXPECT_EQ(e.line(), 1);
    }
  }
}

TEST(LabelParser, OutOfRangeValues) {
  for (const char* bad : {"0 1.2 0.5 0.2 0.2", "0 0.5 0.5 0 0.2", "0 0.05 0.5 0.2 0.2", "-1 0.5 0.5 0.2 0.2"}) {
    try {
      parse_labels(bad);
      FAIL() << bad;
    } catch (const LabelParseError& e) {
      EXPECT_EQ(e.code(), Errc::OutOfRangeValue) << bad;
    }
  }
}

TEST(LabelFiles, WriteAndReadBack) {
  testkit::TempDir dir;
  const std::vector<LabelRecord> recs{to_normalized({0, 0, 10, 10}, 0, 100, 100),
                                      to_normalized({50, 20, 90, 80}, 3, 100, 100)};
  const auto path = write_label_file(recs, "img_001", dir.path());
  EXPECT_EQ(path.filename(), "img_001.txt");
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "0 0.050000 0.050000 0.100000 0.100000\n3 0.700000 0.500000 0.400000 0.600000\n");
  EXPECT_EQ(parse_label_file(path).size(), 2u);
  // an empty record list still produces a file (a clean image)
  const auto empty = write_label_file({}, "clean", dir.path());
  EXPECT_TRUE(std::filesystem::exists(empty));
  EXPECT_EQ(std::filesystem::file_size(empty), 0u);
}

TEST(LabelFiles, MissingDirectoryIsIoFailure) {
  testkit::TempDir dir;
  try {
    write_label_file({}, "x", dir / "nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoFailure);
  }
}
