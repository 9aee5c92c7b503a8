#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "surgscan/dataset/manifest.hpp"

namespace surgscan::dataset {

inline constexpr const char* kConfigFileName = "dataset.yaml";
inline constexpr const char* kManifestRelPath = "manifest/manifest.jsonl";

/// Materializes root/images/{train,val}, the mirrored root/labels/{train,val},
/// root/manifest/manifest.jsonl and the key/value dataset config. Returns the
/// config path. Re-emitting an unchanged manifest produces identical bytes.
std::filesystem::path emit_dataset_config(const DatasetManifest& manifest,
                                          const std::filesystem::path& root);

struct Finding {
  enum class Kind { OrphanImage, OrphanLabel, MalformedLabel, Leakage };
  Kind kind;
  std::string path;
  std::string detail;
};

std::string_view to_string(Finding::Kind kind);

struct ValidationReport {
  std::vector<Finding> findings;

  bool empty() const noexcept { return findings.empty(); }
  std::size_t count(Finding::Kind kind) const;
};

/// Walks an emitted dataset and reports orphan images, orphan labels,
/// malformed label lines and augmentation leakage into val.
ValidationReport validate_layout(const std::filesystem::path& root);

}  // namespace surgscan::dataset
