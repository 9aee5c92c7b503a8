#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "surgscan/inference/backend.hpp"

namespace surgscan::inference {

struct DefectVerdict {
  DefectClass defect = DefectClass::NonDefective;
  double confidence = 0.0;

  friend bool operator==(const DefectVerdict&, const DefectVerdict&) = default;
};

enum class Overall { Defective, NonDefective };

std::string_view to_string(Overall o);

struct InspectionResult {
  InstrumentClass instrument = InstrumentClass::Carver;
  double instrument_confidence = 0.0;
  std::vector<DefectVerdict> defects;  // at or above defect_threshold
  Overall overall = Overall::NonDefective;
  std::string instrument_backend_id;
  std::string defect_backend_id;
  double instrument_ms = 0.0;
  double defect_ms = 0.0;
};

struct CascadeConfig {
  double instrument_threshold = 0.50;
  double defect_threshold = 0.50;
  std::string instrument_backend;
  std::map<InstrumentClass, std::string> defect_backends;

  /// Thresholds in (0,1); every referenced id registered with the matching
  /// stage and instrument. Instruments without an entry are allowed and fail
  /// at inspection time with NoBackendForInstrument.
  void validate(const BackendRegistry& registry) const;
};

/// Carries the stage-1 verdict so an operator can review the image.
class LowConfidenceError : public Error {
 public:
  explicit LowConfidenceError(ClassifierVerdict verdict, double threshold);
  const ClassifierVerdict& verdict() const noexcept { return verdict_; }

 private:
  ClassifierVerdict verdict_;
};

/// Top-confidence label from the backend, parsed into the instrument
/// vocabulary (UnknownLabel otherwise). Empty output is a BackendFailure.
ClassifierVerdict classify_instrument(const InspectionInput& input, ClassifierBackend& backend);

/// All defect verdicts from an instrument-specific backend. An empty list
/// means the instrument is clean.
std::vector<DefectVerdict> classify_defects(const InspectionInput& input, ClassifierBackend& backend);

/// Stage-2 through a registry; NoBackendForInstrument when the config has no
/// entry for the instrument.
std::vector<DefectVerdict> classify_defects(const InspectionInput& input, InstrumentClass instrument,
                                            const BackendRegistry& registry,
                                            const CascadeConfig& cfg);

/// Two-stage inspection. Immutable after construction; inspect() may be
/// called from many threads.
class Cascade {
 public:
  Cascade(std::shared_ptr<const BackendRegistry> registry, CascadeConfig cfg);

  InspectionResult inspect(const InspectionInput& input) const;

  const CascadeConfig& config() const noexcept { return cfg_; }
  const BackendRegistry& registry() const noexcept { return *registry_; }

 private:
  std::shared_ptr<const BackendRegistry> registry_;
  CascadeConfig cfg_;
};

}  // namespace surgscan::inference
