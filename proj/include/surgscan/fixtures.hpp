#pragma once

// Synthetic fixture sets standing in for the proprietary capture corpus:
// rendered instrument images with painted defect patches, ground-truth tag
// sidecars for the stub backends, and XML source annotations.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "surgscan/dataset/manifest.hpp"
#include "surgscan/imaging.hpp"

namespace surgscan::fixtures {

struct SyntheticSpec {
  std::vector<InstrumentClass> instruments{kAllInstruments.begin(), kAllInstruments.end()};
  int defective_per_instrument = 20;
  int clean_per_instrument = 20;
  int width = 160;
  int height = 160;
  std::uint64_t seed = 0;
};

/// Entries only; image paths point into image_dir. Defective images cycle
/// through the five defect classes and carry one or two boxes.
dataset::DatasetManifest synthetic_manifest(const SyntheticSpec& spec,
                                            const std::filesystem::path& image_dir);

/// Deterministic rendering of an entry: background, an instrument-shaped bar
/// and one colored patch per defect box.
imaging::Raster render_fixture(const AnnotatedImage& image, std::uint64_t seed);

/// Writes dir/images/<id>.png with a tag sidecar per image and, when
/// requested, dir/annotations/<id>.xml. Returns the manifest of originals.
dataset::DatasetManifest write_fixture_set(const SyntheticSpec& spec, const std::filesystem::path& dir,
                                           bool with_annotations = true);

}  // namespace surgscan::fixtures
