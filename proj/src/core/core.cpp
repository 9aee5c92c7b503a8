#include "surgscan/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

namespace surgscan {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::UnknownInstrument: return "UnknownInstrument";
    case Errc::UnknownDefect: return "UnknownDefect";
    case Errc::DegenerateBox: return "DegenerateBox";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidAngle: return "InvalidAngle";
    case Errc::BadImage: return "BadImage";
    case Errc::IoFailure: return "IoFailure";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::OutOfRangeValue: return "OutOfRangeValue";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::AlreadyAugmented: return "AlreadyAugmented";
    case Errc::NotSplit: return "NotSplit";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::BackendFailure: return "BackendFailure";
    case Errc::NoBackendForInstrument: return "NoBackendForInstrument";
    case Errc::LowConfidenceInstrument: return "LowConfidenceInstrument";
    case Errc::DuplicateBackend: return "DuplicateBackend";
    case Errc::UnregisteredBackend: return "UnregisteredBackend";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::DegenerateLabels: return "DegenerateLabels";
  }
  return "Unknown";
}

namespace {

std::string fold(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  for (char ch : label) {
    if (ch == '-' || ch == '_' || std::isspace(static_cast<unsigned char>(ch))) continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

constexpr std::pair<std::string_view, InstrumentClass> kInstrumentAliases[] = {
    {"carver", InstrumentClass::Carver},
    {"exprobe", InstrumentClass::ExProbe},
    {"probe", InstrumentClass::Probe},
    {"scalpel", InstrumentClass::Scalpel},
    {"scissors", InstrumentClass::Scissors},
    {"bandagescissors", InstrumentClass::BandageScissors},
    {"dressingforceps", InstrumentClass::DressingForceps},
    {"mcindoeforceps", InstrumentClass::McIndoeForceps},
    {"nailclippers", InstrumentClass::NailClippers},
    {"nailcutter", InstrumentClass::NailClippers},
    {"nailcutters", InstrumentClass::NailClippers},
    {"tealevulsellumforceps", InstrumentClass::TealeVulsellumForceps},
    {"uterinecurettes", InstrumentClass::UterineCurettes},
};

constexpr std::pair<std::string_view, DefectClass> kDefectAliases[] = {
    {"pore", DefectClass::Pore},
    {"pores", DefectClass::Pore},
    {"crack", DefectClass::Crack},
    {"cracks", DefectClass::Crack},
    {"corrosion", DefectClass::Corrosion},
    {"rust", DefectClass::Corrosion},
    {"corrosion/rust", DefectClass::Corrosion},
    {"cut", DefectClass::Cut},
    {"cuts", DefectClass::Cut},
    {"scratch", DefectClass::Scratch},
    {"scratches", DefectClass::Scratch},
    {"nondefective", DefectClass::NonDefective},
    {"clean", DefectClass::NonDefective},
};

}  // namespace

std::string_view to_string(InstrumentClass c) {
  switch (c) {
    case InstrumentClass::Carver: return "Carver";
    case InstrumentClass::ExProbe: return "ExProbe";
    case InstrumentClass::Probe: return "Probe";
    case InstrumentClass::Scalpel: return "Scalpel";
    case InstrumentClass::Scissors: return "Scissors";
    case InstrumentClass::BandageScissors: return "BandageScissors";
    case InstrumentClass::DressingForceps: return "DressingForceps";
    case InstrumentClass::McIndoeForceps: return "McIndoeForceps";
    case InstrumentClass::NailClippers: return "NailClippers";
    case InstrumentClass::TealeVulsellumForceps: return "TealeVulsellumForceps";
    case InstrumentClass::UterineCurettes: return "UterineCurettes";
  }
  return "?";
}

std::string_view to_string(DefectClass c) {
  switch (c) {
    case DefectClass::Pore: return "Pore";
    case DefectClass::Crack: return "Crack";
    case DefectClass::Corrosion: return "Corrosion";
    case DefectClass::Cut: return "Cut";
    case DefectClass::Scratch: return "Scratch";
    case DefectClass::NonDefective: return "NonDefective";
  }
  return "?";
}

std::optional<InstrumentClass> try_parse_instrument(std::string_view label) {
  const std::string key = fold(label);
  for (const auto& [alias, value] : kInstrumentAliases) {
    if (alias == key) return value;
  }
  return std::nullopt;
}

std::optional<DefectClass> try_parse_defect(std::string_view label) {
  const std::string key = fold(label);
  for (const auto& [alias, value] : kDefectAliases) {
    if (alias == key) return value;
  }
  return std::nullopt;
}

InstrumentClass parse_instrument(std::string_view label) {
  if (auto parsed = try_parse_instrument(label)) return *parsed;
  throw Error(Errc::UnknownInstrument, "unknown instrument: '" + std::string(label) + "'");
}

DefectClass parse_defect(std::string_view label) {
  if (auto parsed = try_parse_defect(label)) return *parsed;
  throw Error(Errc::UnknownDefect, "unknown defect class: '" + std::string(label) + "'");
}

PixelBBox validate_bbox(const PixelBBox& box, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::InvalidArgument, "image dimensions must be positive");
  }
  if (box.x_max <= box.x_min || box.y_max <= box.y_min) {
    throw Error(Errc::DegenerateBox, "box has zero area");
  }
  if (box.x_min < 0 || box.y_min < 0 || box.x_max > width || box.y_max > height) {
    throw Error(Errc::OutOfBounds, "box exceeds image dimensions " + std::to_string(width) +
                                       "x" + std::to_string(height));
  }
  return box;
}

std::optional<std::string> normalized_bbox_violation(const NormalizedBBox& b) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (b.class_id < 0) return "class_id is negative";
  if (!finite(b.cx) || !finite(b.cy) || !finite(b.w) || !finite(b.h)) return "non-finite value";
  if (!(b.w > 0.0 && b.w <= 1.0)) return "width outside (0,1]";
  if (!(b.h > 0.0 && b.h <= 1.0)) return "height outside (0,1]";
  if (b.cx < 0.0 || b.cx > 1.0) return "x-center outside [0,1]";
  if (b.cy < 0.0 || b.cy > 1.0) return "y-center outside [0,1]";
  const double lo = -kNormalizedSlack;
  const double hi = 1.0 + kNormalizedSlack;
  if (b.cx - b.w / 2 < lo || b.cx + b.w / 2 > hi) return "box extends past horizontal frame";
  if (b.cy - b.h / 2 < lo || b.cy + b.h / 2 > hi) return "box extends past vertical frame";
  return std::nullopt;
}

bool AnnotatedImage::is_defective() const noexcept {
  return std::any_of(defects.begin(), defects.end(), [](const DefectAnnotation& d) {
    return d.defect != DefectClass::NonDefective;
  });
}

void validate_annotated_image(const AnnotatedImage& image) {
  for (const auto& d : image.defects) validate_bbox(d.box, image.width, image.height);
}

}  // namespace surgscan
