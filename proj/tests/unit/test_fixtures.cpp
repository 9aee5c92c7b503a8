#include <gtest/gtest.h>

#include <set>

#include "surgscan/codec.hpp"
#include "surgscan/fixtures.hpp"
#include "surgscan/inference/stub_backend.hpp"
#include "test_support.hpp"

using namespace surgscan;
using namespace surgscan::fixtures;

TEST(Fixtures, ManifestShape) {
  SyntheticSpec spec;
  spec.defective_per_instrument = 3;
  spec.clean_per_instrument = 2;
  const auto m = synthetic_manifest(spec, "imgs");
  EXPECT_EQ(m.entries.size(), 11u * 5u);
  std::set<DefectClass> classes;
  for (const auto& e : m.entries) {
    EXPECT_EQ(e.is_defective(), e.id.find("_d_") != std::string::npos) << e.id;
    if (e.is_defective()) {
      EXPECT_GE(e.defects.size(), 1u);
      EXPECT_LE(e.defects.size(), 2u);
    }
    for (const auto& d : e.defects) classes.insert(d.defect);
    EXPECT_NO_THROW(validate_annotated_image(e));
  }
  EXPECT_EQ(classes.size(), 5u);
  EXPECT_EQ(m.class_map.size(), 5u);
  EXPECT_NO_THROW(m.validate(false));
  EXPECT_EQ(synthetic_manifest(spec, "imgs"), m);
  SyntheticSpec tiny = spec;
  tiny.width = 8;
  EXPECT_THROW(synthetic_manifest(tiny, "imgs"), Error);
}

TEST(Fixtures, RenderingIsDeterministicAndPaintsBoxes) {
  SyntheticSpec spec;
  spec.instruments = {InstrumentClass::Scalpel};
  spec.defective_per_instrument = 1;
  spec.clean_per_instrument = 1;
  const auto m = synthetic_manifest(spec, "imgs");
  const auto& defective = m.entries[0];
  const auto a = render_fixture(defective, 1);
  EXPECT_EQ(a, render_fixture(defective, 1));
  EXPECT_NE(a, render_fixture(defective, 2));
  EXPECT_NE(a, render_fixture(m.entries[1], 1));
  // the box centre differs from the background corner
  const auto& box = defective.defects.back().box;
  const auto centre = a.at((box.x_min + box.x_max) / 2, (box.y_min + box.y_max) / 2);
  const auto corner = a.at(0, 0);
  EXPECT_GT(std::abs(centre.r - corner.r) + std::abs(centre.g - corner.g) + std::abs(centre.b - corner.b), 60);
}

TEST(Fixtures, WriteSetProducesImagesTagsAndAnnotations) {
  testkit::TempDir dir;
  SyntheticSpec spec;
  spec.instruments = {InstrumentClass::Probe, InstrumentClass::NailClippers};
  spec.defective_per_instrument = 2;
  spec.clean_per_instrument = 1;
  spec.width = 32;
  spec.height = 24;
  const auto m = write_fixture_set(spec, dir.path());
  for (const auto& e : m.entries) {
    const auto img = imaging::load_image(e.path);
    EXPECT_EQ(img.width(), 32);
    EXPECT_EQ(img.height(), 24);
    const auto tags = inference::read_fixture_tags(inference::tags_path_for(e.path));
    EXPECT_EQ(tags.instrument, e.instrument);
    EXPECT_EQ(tags.defects.empty(), !e.is_defective());
    EXPECT_TRUE(std::filesystem::exists(dir / ("annotations/" + e.id + ".xml")));
  }
  testkit::TempDir bare;
  write_fixture_set(spec, bare.path(), false);
  EXPECT_FALSE(std::filesystem::exists(bare / "annotations"));
}
