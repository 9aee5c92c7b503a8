#pragma once

// Deterministic reference backends that echo ground-truth tags from fixture
// sidecar files. They let the cascade, CLI and service run end to end
// without trained weights.
//
// Sidecar: "<image file>.tags.json"
//   {"instrument": "Scissors", "instrument_confidence": 1.0,
//    "defects": [{"class": "Corrosion", "confidence": 1.0}]}
// Confidences default to 1.0 when omitted.

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "surgscan/inference/backend.hpp"

namespace surgscan::inference {

struct FixtureTags {
  InstrumentClass instrument = InstrumentClass::Carver;
  double instrument_confidence = 1.0;
  std::vector<std::pair<DefectClass, double>> defects;

  friend bool operator==(const FixtureTags&, const FixtureTags&) = default;
};

std::filesystem::path tags_path_for(const std::filesystem::path& image);
void write_fixture_tags(const std::filesystem::path& image, const FixtureTags& tags);
FixtureTags read_fixture_tags(const std::filesystem::path& tags_file);

/// Resolves tags for an input: first from the sidecar next to input.source,
/// then by content digest over every sidecar found under the indexed
/// directories (so re-encoded or relocated uploads still resolve).
class FixtureTagIndex {
 public:
  FixtureTagIndex() = default;
  explicit FixtureTagIndex(const std::vector<std::filesystem::path>& fixture_dirs);

  void add_directory(const std::filesystem::path& dir);
  void add(const std::string& content_digest, FixtureTags tags);

  /// Throws BackendFailure when no tags are known for the input.
  FixtureTags lookup(const InspectionInput& input) const;

  std::size_t size() const noexcept { return by_digest_.size(); }

 private:
  std::map<std::string, FixtureTags> by_digest_;
};

class StubInstrumentBackend : public ClassifierBackend {
 public:
  explicit StubInstrumentBackend(std::shared_ptr<const FixtureTagIndex> index)
      : index_(std::move(index)) {}
  std::vector<ClassifierVerdict> run(const InspectionInput& input) override;

 private:
  std::shared_ptr<const FixtureTagIndex> index_;
};

class StubDefectBackend : public ClassifierBackend {
 public:
  explicit StubDefectBackend(std::shared_ptr<const FixtureTagIndex> index)
      : index_(std::move(index)) {}
  std::vector<ClassifierVerdict> run(const InspectionInput& input) override;

 private:
  std::shared_ptr<const FixtureTagIndex> index_;
};

struct CascadeConfig;

/// Registers "stub-instrument" plus one "stub-defect-<Instrument>" per
/// instrument and fills cfg with matching ids.
void register_stub_backends(BackendRegistry& registry, CascadeConfig& cfg,
                            std::shared_ptr<const FixtureTagIndex> index);

}  // namespace surgscan::inference
