#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace surgscan {

/// Machine-readable error categories shared by every module.
enum class Errc {
  UnknownInstrument,
  UnknownDefect,
  DegenerateBox,
  OutOfBounds,
  InvalidArgument,
  InvalidAngle,
  BadImage,
  IoFailure,
  MalformedLine,
  OutOfRangeValue,
  EmptyDataset,
  AlreadyAugmented,
  NotSplit,
  UnknownLabel,
  BackendFailure,
  NoBackendForInstrument,
  LowConfidenceInstrument,
  DuplicateBackend,
  UnregisteredBackend,
  InvalidConfig,
  LengthMismatch,
  EmptyMatrix,
  DegenerateLabels,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Vocabulary

enum class InstrumentClass : std::uint8_t {
  Carver,
  ExProbe,
  Probe,
  Scalpel,
  Scissors,
  BandageScissors,
  DressingForceps,
  McIndoeForceps,
  NailClippers,
  TealeVulsellumForceps,
  UterineCurettes,
};

inline constexpr std::array<InstrumentClass, 11> kAllInstruments = {
    InstrumentClass::Carver,          InstrumentClass::ExProbe,
    InstrumentClass::Probe,           InstrumentClass::Scalpel,
    InstrumentClass::Scissors,        InstrumentClass::BandageScissors,
    InstrumentClass::DressingForceps, InstrumentClass::McIndoeForceps,
    InstrumentClass::NailClippers,    InstrumentClass::TealeVulsellumForceps,
    InstrumentClass::UterineCurettes,
};

enum class DefectClass : std::uint8_t {
  Pore,
  Crack,
  Corrosion,
  Cut,
  Scratch,
  NonDefective,
};

inline constexpr std::array<DefectClass, 6> kAllDefects = {
    DefectClass::Pore,    DefectClass::Crack,   DefectClass::Corrosion,
    DefectClass::Cut,     DefectClass::Scratch, DefectClass::NonDefective,
};

std::string_view to_string(InstrumentClass c);
std::string_view to_string(DefectClass c);

/// Case-, hyphen-, underscore- and space-insensitive match against the
/// closed instrument set. "Nail cutter" is accepted as NailClippers.
InstrumentClass parse_instrument(std::string_view label);

/// Accepts canonical names plus the plural/alias spellings used in
/// annotation corpora ("scratches", "rust", "non-defective", ...).
DefectClass parse_defect(std::string_view label);

std::optional<InstrumentClass> try_parse_instrument(std::string_view label);
std::optional<DefectClass> try_parse_defect(std::string_view label);

// ---------------------------------------------------------------------------
// Boxes

/// Half-open pixel box: x_max and y_max are exclusive.
struct PixelBBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const noexcept { return x_max - x_min; }
  int height() const noexcept { return y_max - y_min; }

  friend bool operator==(const PixelBBox&, const PixelBBox&) = default;
};

/// Throws DegenerateBox for zero or negative area, OutOfBounds when the box
/// leaves the [0,width] x [0,height] frame.
PixelBBox validate_bbox(const PixelBBox& box, int width, int height);

struct NormalizedBBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const NormalizedBBox&, const NormalizedBBox&) = default;
};

inline constexpr double kNormalizedSlack = 1e-9;

/// Returns the first violated range invariant, or nullopt when the box is valid.
std::optional<std::string> normalized_bbox_violation(const NormalizedBBox& box);

// ---------------------------------------------------------------------------
// Annotated images

struct OriginalProvenance {
  friend bool operator==(const OriginalProvenance&, const OriginalProvenance&) = default;
};

struct AugmentedProvenance {
  std::string parent_id;
  std::string transform;  // canonical transform descriptor

  friend bool operator==(const AugmentedProvenance&, const AugmentedProvenance&) = default;
};

using Provenance = std::variant<OriginalProvenance, AugmentedProvenance>;

struct DefectAnnotation {
  DefectClass defect = DefectClass::NonDefective;
  PixelBBox box;

  friend bool operator==(const DefectAnnotation&, const DefectAnnotation&) = default;
};

struct AnnotatedImage {
  std::string id;
  std::string path;
  int width = 0;
  int height = 0;
  InstrumentClass instrument = InstrumentClass::Carver;
  std::vector<DefectAnnotation> defects;
  Provenance provenance = OriginalProvenance{};

  bool is_original() const noexcept {
    return std::holds_alternative<OriginalProvenance>(provenance);
  }
  /// True when any annotation carries a class other than NonDefective.
  bool is_defective() const noexcept;

  friend bool operator==(const AnnotatedImage&, const AnnotatedImage&) = default;
};

/// Checks every box against the image dimensions.
void validate_annotated_image(const AnnotatedImage& image);

}  // namespace surgscan
