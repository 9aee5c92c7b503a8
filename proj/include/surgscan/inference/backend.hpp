#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/core.hpp"
#include "surgscan/imaging.hpp"

namespace surgscan::inference {

struct ClassifierVerdict {
  std::string label;
  double confidence = 0.0;

  friend bool operator==(const ClassifierVerdict&, const ClassifierVerdict&) = default;
};

/// What a backend sees for one image. `source` is an on-disk copy of the
/// image when one exists; `content_digest` is the SHA-256 of the original
/// encoded bytes when known.
struct InspectionInput {
  const imaging::Raster& raster;
  std::filesystem::path source;
  std::string content_digest;
};

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;

  /// Every (label, confidence) the model emits for the image. Implementations
  /// report failures by throwing; anything other than surgscan::Error is
  /// surfaced as BackendFailure.
  virtual std::vector<ClassifierVerdict> run(const InspectionInput& input) = 0;

  /// Non-safe backends are serialized by the registry.
  virtual bool concurrency_safe() const { return true; }
};

enum class Stage { Instrument, Defect };

struct BackendKind {
  Stage stage = Stage::Instrument;
  std::optional<InstrumentClass> instrument;  // set for Stage::Defect

  static BackendKind stage1() { return {Stage::Instrument, std::nullopt}; }
  static BackendKind stage2(InstrumentClass c) { return {Stage::Defect, c}; }

  friend bool operator==(const BackendKind&, const BackendKind&) = default;
};

class BackendRegistry {
 public:
  /// Throws DuplicateBackend when the id is taken.
  void register_backend(std::string id, BackendKind kind, std::shared_ptr<ClassifierBackend> impl);

  bool contains(std::string_view id) const;
  /// Throws UnregisteredBackend.
  std::shared_ptr<ClassifierBackend> resolve(std::string_view id) const;
  const BackendKind& kind(std::string_view id) const;

  /// Runs the backend, holding its lock when it is not concurrency-safe.
  std::vector<ClassifierVerdict> invoke(std::string_view id, const InspectionInput& input) const;

  std::vector<std::string> ids() const;

 private:
  struct Entry {
    BackendKind kind;
    std::shared_ptr<ClassifierBackend> impl;
    std::unique_ptr<std::mutex> lock;
  };
  const Entry& entry(std::string_view id) const;

  std::map<std::string, Entry, std::less<>> entries_;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace surgscan::inference
