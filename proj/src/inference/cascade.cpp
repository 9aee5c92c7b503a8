#include "surgscan/inference/cascade.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace surgscan::inference {

std::string_view to_string(Overall o) { return o == Overall::Defective ? "Defective" : "NonDefective"; }

namespace {

void check_confidence(const ClassifierVerdict& v) {
  if (!std::isfinite(v.confidence) || v.confidence < 0.0 || v.confidence > 1.0) {
    throw Error(Errc::BackendFailure, "confidence for '" + v.label + "' outside [0,1]");
  }
}

ClassifierVerdict top_instrument(const std::vector<ClassifierVerdict>& verdicts) {
  if (verdicts.empty()) throw Error(Errc::BackendFailure, "instrument backend returned no label");
  const ClassifierVerdict* best = nullptr;
  for (const auto& v : verdicts) {
    check_confidence(v);
    if (!best || v.confidence > best->confidence) best = &v;
  }
  const auto parsed = try_parse_instrument(best->label);
  if (!parsed) throw Error(Errc::UnknownLabel, "backend emitted unknown instrument '" + best->label + "'");
  return {std::string(to_string(*parsed)), best->confidence};
}

std::vector<DefectVerdict> to_defects(const std::vector<ClassifierVerdict>& verdicts) {
  std::vector<DefectVerdict> out;
  out.reserve(verdicts.size());
  for (const auto& v : verdicts) {
    check_confidence(v);
    const auto parsed = try_parse_defect(v.label);
    if (!parsed) throw Error(Errc::UnknownLabel, "backend emitted unknown defect '" + v.label + "'");
    out.push_back({*parsed, v.confidence});
  }
  return out;
}

std::vector<ClassifierVerdict> run_guarded(ClassifierBackend& backend, const InspectionInput& input) {
  try {
    return backend.run(input);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error(Errc::BackendFailure, ex.what());
  }
}

void check_threshold(double t, const char* name) {
  if (!(t > 0.0 && t < 1.0)) throw Error(Errc::InvalidConfig, std::string(name) + " must lie in (0,1)");
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

LowConfidenceError::LowConfidenceError(ClassifierVerdict verdict, double threshold)
    : Error(Errc::LowConfidenceInstrument,
            [&] {
              char buf[64];
              std::snprintf(buf, sizeof(buf), "%.4f < %.4f", verdict.confidence, threshold);
              return "instrument '" + verdict.label + "' confidence " + buf;
            }()),
      verdict_(std::move(verdict)) {}

void CascadeConfig::validate(const BackendRegistry& registry) const {
  check_threshold(instrument_threshold, "instrument_threshold");
  check_threshold(defect_threshold, "defect_threshold");
  if (instrument_backend.empty()) throw Error(Errc::InvalidConfig, "no instrument backend configured");
  if (!registry.contains(instrument_backend)) {
    throw Error(Errc::InvalidConfig, "instrument backend '" + instrument_backend + "' is not registered");
  }
  if (registry.kind(instrument_backend).stage != Stage::Instrument) {
    throw Error(Errc::InvalidConfig, "backend '" + instrument_backend + "' is not a stage-1 backend");
  }
  for (const auto& [instrument, id] : defect_backends) {
    if (!registry.contains(id)) {
      throw Error(Errc::InvalidConfig, "defect backend '" + id + "' is not registered");
    }
    const auto& kind = registry.kind(id);
    if (kind.stage != Stage::Defect || kind.instrument != instrument) {
      throw Error(Errc::InvalidConfig, "backend '" + id + "' is not registered as the stage-2 model for " +
                                           std::string(to_string(instrument)));
    }
  }
}

ClassifierVerdict classify_instrument(const InspectionInput& input, ClassifierBackend& backend) {
  return top_instrument(run_guarded(backend, input));
}

std::vector<DefectVerdict> classify_defects(const InspectionInput& input, ClassifierBackend& backend) {
  return to_defects(run_guarded(backend, input));
}

std::vector<DefectVerdict> classify_defects(const InspectionInput& input, InstrumentClass instrument,
                                            const BackendRegistry& registry,
                                            const CascadeConfig& cfg) {
  auto it = cfg.defect_backends.find(instrument);
  if (it == cfg.defect_backends.end()) {
    throw Error(Errc::NoBackendForInstrument,
                "no defect backend registered for " + std::string(to_string(instrument)));
  }
  return to_defects(registry.invoke(it->second, input));
}

Cascade::Cascade(std::shared_ptr<const BackendRegistry> registry, CascadeConfig cfg)
    : registry_(std::move(registry)), cfg_(std::move(cfg)) {
  if (!registry_) throw Error(Errc::InvalidConfig, "cascade needs a backend registry");
  cfg_.validate(*registry_);
}

InspectionResult Cascade::inspect(const InspectionInput& input) const {
  InspectionResult result;

  auto t0 = std::chrono::steady_clock::now();
  const ClassifierVerdict stage1 = top_instrument(registry_->invoke(cfg_.instrument_backend, input));
  result.instrument_ms = elapsed_ms(t0);
  result.instrument = parse_instrument(stage1.label);
  result.instrument_confidence = stage1.confidence;
  result.instrument_backend_id = cfg_.instrument_backend;
  if (stage1.confidence < cfg_.instrument_threshold) {
    throw LowConfidenceError(stage1, cfg_.instrument_threshold);
  }

  auto it = cfg_.defect_backends.find(result.instrument);
  if (it == cfg_.defect_backends.end()) {
    throw Error(Errc::NoBackendForInstrument,
                "no defect backend registered for " + std::string(to_string(result.instrument)));
  }
  result.defect_backend_id = it->second;
  t0 = std::chrono::steady_clock::now();
  const auto verdicts = to_defects(registry_->invoke(it->second, input));
  result.defect_ms = elapsed_ms(t0);

  for (const auto& v : verdicts) {
    if (v.confidence >= cfg_.defect_threshold) result.defects.push_back(v);
  }
  const bool defective = std::any_of(result.defects.begin(), result.defects.end(), [](const DefectVerdict& v) {
    return v.defect != DefectClass::NonDefective;
  });
  result.overall = defective ? Overall::Defective : Overall::NonDefective;
  return result;
}

}  // namespace surgscan::inference
