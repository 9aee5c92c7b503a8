#include <gtest/gtest.h>

#include <fstream>

#include "surgscan/codec.hpp"
#include "surgscan/dataset/annotations.hpp"
#include "surgscan/fixtures.hpp"
#include "test_support.hpp"

using namespace surgscan;
using namespace surgscan::dataset;
namespace fs = std::filesystem;

namespace {

const char* kSample = R"(<annotation>
  <filename>scissors_001.png</filename>
  <instrument> nail cutter </instrument>
  <size><width>1600</width><height>1600</height></size>
  <object>
    <name>Corrosion</name>
    <bndbox><xmin>400</xmin><ymin>400</ymin><xmax>800</xmax><ymax>1200</ymax></bndbox>
  </object>
  <object>
    <name>scratches</name>
    <bndbox><xmin>10.4</xmin><ymin>20.6</ymin><xmax>30</xmax><ymax>40</ymax></bndbox>
  </object>
</annotation>
)";

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST(AnnotationXml, ParsesDocument) {
  const auto img = parse_annotation_xml(kSample, "imgs");
  EXPECT_EQ(img.id, "scissors_001");
  EXPECT_EQ(fs::path(img.path), fs::path("imgs/scissors_001.png"));
  EXPECT_EQ(img.instrument, InstrumentClass::NailClippers);
  EXPECT_EQ(img.width, 1600);
  ASSERT_EQ(img.defects.size(), 2u);
  EXPECT_EQ(img.defects[0].defect, DefectClass::Corrosion);
  EXPECT_EQ(img.defects[0].box, (PixelBBox{400, 400, 800, 1200}));
  EXPECT_EQ(img.defects[1].defect, DefectClass::Scratch);
  EXPECT_EQ(img.defects[1].box, (PixelBBox{10, 21, 30, 40}));
}

TEST(AnnotationXml, FormatParsesBack) {
  const auto img = parse_annotation_xml(kSample, "imgs");
  EXPECT_EQ(parse_annotation_xml(format_annotation_xml(img), "imgs"), img);
}

TEST(AnnotationXml, SizeFallsBackToImage) {
  testkit::TempDir dir;
  imaging::save_png(testkit::random_raster(21, 13, 3), dir / "a.png");
  const auto img = parse_annotation_xml(
      "<annotation><filename>a.png</filename><instrument>Probe</instrument></annotation>", dir.path());
  EXPECT_EQ(img.width, 21);
  EXPECT_EQ(img.height, 13);
  EXPECT_TRUE(img.defects.empty());
}

TEST(AnnotationXml, RejectsMalformedDocuments) {
  const std::vector<std::string> bad{
      "<annotation><filename>a.png</filename>",
      "<other/>",
      "<annotation><instrument>Probe</instrument><size><width>5</width><height>5</height></size></annotation>",
      "<annotation><filename>a.png</filename><size><width>5</width><height>5</height></size></annotation>",
      "<annotation><filename>a.png</filename><instrument>Spoon</instrument>"
      "<size><width>5</width><height>5</height></size></annotation>",
      "<annotation><filename>a.png</filename><instrument>Probe</instrument>"
      "<size><width>x</width><height>5</height></size></annotation>",
      "<annotation><filename>a.png</filename><instrument>Probe</instrument>"
      "<size><width>5</width><height>5</height></size><object><name>Crack</name></object></annotation>",
      "<annotation><filename>a.png</filename><instrument>Probe</instrument>"
      "<size><width>5</width><height>5</height></size><object><name>Crack</name>"
      "<bndbox><xmin>0</xmin><ymin>0</ymin><xmax>9</xmax><ymax>3</ymax></bndbox></object></annotation>",
      "<annotation><filename>a.png</filename><instrument>Probe</instrument>"
      "<size><width>5</width><height>5</height></size><object><name>Dent</name>"
      "<bndbox><xmin>0</xmin><ymin>0</ymin><xmax>2</xmax><ymax>3</ymax></bndbox></object></annotation>",
  };
  for (const auto& doc : bad) EXPECT_THROW(parse_annotation_xml(doc, "."), Error) << doc;
}

TEST(Conversion, CountsAndDiagnostics) {
  testkit::TempDir dir;
  fixtures::SyntheticSpec spec;
  spec.instruments = {InstrumentClass::Carver, InstrumentClass::Scalpel};
  spec.defective_per_instrument = 4;
  spec.clean_per_instrument = 3;
  spec.width = 40;
  spec.height = 30;
  const auto truth = fixtures::write_fixture_set(spec, dir.path());
  std::size_t boxes = 0;
  for (const auto& e : truth.entries) boxes += e.defects.size();

  write(dir / "annotations/zz_broken.xml", "<annotation><filename>");
  write(dir / "annotations/zz_missing.xml",
        "<annotation><filename>nope.png</filename><instrument>Probe</instrument>"
        "<size><width>5</width><height>5</height></size></annotation>");
  write(dir / "annotations/readme.txt", "ignored");

  const auto r = convert_annotations(dir / "annotations", dir / "images", dir / "labels");
  EXPECT_EQ(r.images, truth.entries.size());
  EXPECT_EQ(r.boxes, boxes);
  ASSERT_EQ(r.diagnostics.size(), 2u);
  EXPECT_NE(r.diagnostics[0].file.find("zz_broken.xml"), std::string::npos);
  EXPECT_NE(r.diagnostics[1].file.find("zz_missing.xml"), std::string::npos);
  EXPECT_EQ(r.manifest.class_map, truth.class_map);

  std::size_t label_files = 0;
  for (const auto& item : fs::directory_iterator(dir / "labels")) label_files += item.path().extension() == ".txt";
  EXPECT_EQ(label_files, truth.entries.size());
  for (const auto& e : r.manifest.entries) {
    const auto* t = truth.find(e.id);
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(e.defects, t->defects);
    EXPECT_EQ(e.instrument, t->instrument);
    EXPECT_EQ(parse_label_file(dir / "labels" / (e.id + ".txt")).size(), e.defects.size());
  }
}

TEST(Conversion, EmptyDirectory) {
  testkit::TempDir dir;
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "i");
  const auto r = convert_annotations(dir / "a", dir / "i", dir / "l");
  EXPECT_EQ(r.images, 0u);
  EXPECT_EQ(r.boxes, 0u);
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_THROW(convert_annotations(dir / "missing", dir / "i", dir / "l"), Error);
}
