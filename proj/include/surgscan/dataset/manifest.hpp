#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/core.hpp"
#include "surgscan/dataset/labels.hpp"

namespace surgscan::dataset {

enum class Split { Train, Val };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

/// Inventory of originals, augmented derivatives and split assignments.
struct DatasetManifest {
  std::vector<AnnotatedImage> entries;
  std::map<std::string, int> class_map;  // class name -> class_id
  std::map<std::string, Split> split;    // image id -> split

  const AnnotatedImage* find(std::string_view id) const;

  /// Checks id uniqueness, box validity and parent references. With
  /// require_split, every entry needs an assignment and no Augmented entry
  /// (or parent of one) may sit in Val.
  void validate(bool require_split) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Alphabetical class_id assignment over the defect names that carry boxes.
std::map<std::string, int> build_class_map(const std::vector<AnnotatedImage>& entries);

/// Label records for one image, using the manifest's class map. Annotations
/// tagged NonDefective produce no record.
std::vector<LabelRecord> label_records(const AnnotatedImage& image,
                                       const std::map<std::string, int>& class_map);

/// Line-delimited JSON: a header line with the class map, then one object per
/// entry in manifest order. Byte-stable for equal manifests.
std::string serialize_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(std::string_view text);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace surgscan::dataset
