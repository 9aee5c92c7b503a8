#pragma once

// Normalized center/size label files: one `class_id cx cy w h` line per
// object, six-decimal floats, newline-terminated.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/core.hpp"

namespace surgscan::dataset {

using LabelRecord = NormalizedBBox;

/// Thrown by the label parser; line() is 1-based.
class LabelParseError : public Error {
 public:
  LabelParseError(Errc code, int line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

NormalizedBBox to_normalized(const PixelBBox& box, int class_id, int width, int height);

/// Inverse of to_normalized with half-up rounding. Coordinates are clamped to
/// the frame and a box that would round to zero extent keeps one pixel.
PixelBBox from_normalized(const NormalizedBBox& box, int width, int height);

std::string format_label_line(const LabelRecord& record);
std::string format_labels(std::span<const LabelRecord> records);

std::filesystem::path write_label_file(std::span<const LabelRecord> records,
                                       std::string_view image_stem,
                                       const std::filesystem::path& labels_dir);

/// Whitespace-tolerant; blank lines are skipped but still counted.
std::vector<LabelRecord> parse_labels(std::string_view text);
std::vector<LabelRecord> parse_label_file(const std::filesystem::path& path);

}  // namespace surgscan::dataset
