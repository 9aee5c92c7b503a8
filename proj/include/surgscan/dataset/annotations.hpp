#pragma once

// Source annotations: one XML file per image.
//
//   <annotation>
//     <filename>scissors_001.png</filename>
//     <instrument>Scissors</instrument>
//     <size><width>1600</width><height>1600</height></size>
//     <object>
//       <name>Corrosion</name>
//       <bndbox><xmin>400</xmin><ymin>400</ymin><xmax>800</xmax><ymax>1200</ymax></bndbox>
//     </object>
//   </annotation>
//
// <size> may be omitted, in which case the image is decoded for its
// dimensions. An annotation without <object> elements is a clean image.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/dataset/manifest.hpp"

namespace surgscan::dataset {

/// Parses one annotation document. The image path is resolved against
/// images_dir and the id is the filename stem.
AnnotatedImage parse_annotation_xml(std::string_view xml, const std::filesystem::path& images_dir);

std::string format_annotation_xml(const AnnotatedImage& image);

struct ConversionDiagnostic {
  std::string file;
  std::string message;
};

struct ConversionResult {
  std::size_t images = 0;
  std::size_t boxes = 0;
  std::vector<ConversionDiagnostic> diagnostics;
  DatasetManifest manifest;  // originals, no split yet
};

/// Converts every *.xml under annotations_dir (sorted by name) into label
/// files in labels_dir. Malformed files are reported and skipped. The class
/// map is alphabetical over the corpus unless one is given.
ConversionResult convert_annotations(const std::filesystem::path& annotations_dir,
                                     const std::filesystem::path& images_dir,
                                     const std::filesystem::path& labels_dir,
                                     const std::optional<std::map<std::string, int>>& class_map = {});

}  // namespace surgscan::dataset
