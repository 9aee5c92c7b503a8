#include "surgscan/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>

#include "surgscan/codec.hpp"
#include "surgscan/dataset/annotations.hpp"
#include "surgscan/inference/stub_backend.hpp"

namespace surgscan::fixtures {

namespace fs = std::filesystem;

namespace {

constexpr DefectClass kPaintable[] = {DefectClass::Pore, DefectClass::Crack, DefectClass::Corrosion,
                                      DefectClass::Cut, DefectClass::Scratch};

imaging::Rgb defect_color(DefectClass d) {
  switch (d) {
    case DefectClass::Pore: return {40, 40, 40};
    case DefectClass::Crack: return {10, 10, 90};
    case DefectClass::Corrosion: return {150, 75, 20};
    case DefectClass::Cut: return {200, 30, 30};
    case DefectClass::Scratch: return {245, 245, 245};
    case DefectClass::NonDefective: break;
  }
  return {128, 128, 128};
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

}  // namespace

dataset::DatasetManifest synthetic_manifest(const SyntheticSpec& spec, const fs::path& image_dir) {
  if (spec.width < 16 || spec.height < 16) {
    throw Error(Errc::InvalidArgument, "synthetic images must be at least 16x16");
  }
  dataset::DatasetManifest m;
  int defect_cursor = 0;
  for (InstrumentClass instrument : spec.instruments) {
    const std::string prefix = lower(to_string(instrument));
    for (int defective = 1; defective >= 0; --defective) {
      const int count = defective ? spec.defective_per_instrument : spec.clean_per_instrument;
      for (int i = 0; i < count; ++i) {
        char suffix[32];
        std::snprintf(suffix, sizeof(suffix), "_%c_%03d", defective ? 'd' : 'c', i);
        AnnotatedImage e;
        e.id = prefix + suffix;
        e.path = (image_dir / (e.id + ".png")).string();
        e.width = spec.width;
        e.height = spec.height;
        e.instrument = instrument;
        if (defective) {
          std::mt19937_64 gen(mix(spec.seed, fnv1a(e.id)));
          const int boxes = 1 + static_cast<int>(gen() % 2);
          for (int b = 0; b < boxes; ++b) {
            const int bw = spec.width / 8 + static_cast<int>(gen() % (spec.width / 6));
            const int bh = spec.height / 8 + static_cast<int>(gen() % (spec.height / 6));
            const int x0 = static_cast<int>(gen() % static_cast<std::uint64_t>(spec.width - bw));
            const int y0 = static_cast<int>(gen() % static_cast<std::uint64_t>(spec.height - bh));
            e.defects.push_back({kPaintable[(defect_cursor + b) % 5], {x0, y0, x0 + bw, y0 + bh}});
          }
          ++defect_cursor;
        }
        m.entries.push_back(std::move(e));
      }
    }
  }
  m.class_map = dataset::build_class_map(m.entries);
  return m;
}

imaging::Raster render_fixture(const AnnotatedImage& image, std::uint64_t seed) {
  imaging::Raster img(image.width, image.height, imaging::Rgb{20, 150, 60});
  const int idx = static_cast<int>(image.instrument);
  const int bar_h = std::max(4, image.height / 5 + (idx % 3) * image.height / 20);
  const int bar_y = (image.height - bar_h) / 2;
  const std::uint8_t tone = static_cast<std::uint8_t>(150 + idx * 8);
  for (int y = bar_y; y < bar_y + bar_h; ++y) {
    for (int x = image.width / 10; x < image.width - image.width / 10; ++x) img.set(x, y, {tone, tone, tone});
  }
  for (const auto& d : image.defects) {
    const auto color = defect_color(d.defect);
    for (int y = d.box.y_min; y < d.box.y_max; ++y) {
      for (int x = d.box.x_min; x < d.box.x_max; ++x) img.set(x, y, color);
    }
  }
  return imaging::add_gaussian_noise(img, 2.0, mix(seed, fnv1a(image.id)));
}

dataset::DatasetManifest write_fixture_set(const SyntheticSpec& spec, const fs::path& dir,
                                           bool with_annotations) {
  const fs::path image_dir = dir / "images";
  const fs::path annotation_dir = dir / "annotations";
  fs::create_directories(image_dir);
  if (with_annotations) fs::create_directories(annotation_dir);
  auto manifest = synthetic_manifest(spec, image_dir);
  for (const auto& e : manifest.entries) {
    imaging::save_png(render_fixture(e, spec.seed), e.path);
    inference::FixtureTags tags;
    tags.instrument = e.instrument;
    for (const auto& d : e.defects) {
      const bool seen = std::any_of(tags.defects.begin(), tags.defects.end(),
                                    [&](const auto& t) { return t.first == d.defect; });
      if (!seen) tags.defects.emplace_back(d.defect, 1.0);
    }
    inference::write_fixture_tags(e.path, tags);
    if (with_annotations) {
      std::ofstream out(annotation_dir / (e.id + ".xml"));
      if (!out) throw Error(Errc::IoFailure, "cannot write annotation for " + e.id);
      out << dataset::format_annotation_xml(e);
    }
  }
  return manifest;
}

}  // namespace surgscan::fixtures
