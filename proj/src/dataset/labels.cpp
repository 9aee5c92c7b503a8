#include "surgscan/dataset/labels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace surgscan::dataset {

NormalizedBBox to_normalized(const PixelBBox& box, int class_id, int width, int height) {
  validate_bbox(box, width, height);
  if (class_id < 0) throw Error(Errc::InvalidArgument, "class_id must be non-negative");
  NormalizedBBox n;
  n.class_id = class_id;
  n.cx = (static_cast<double>(box.x_min) + box.x_max) / (2.0 * width);
  n.cy = (static_cast<double>(box.y_min) + box.y_max) / (2.0 * height);
  n.w = static_cast<double>(box.x_max - box.x_min) / width;
  n.h = static_cast<double>(box.y_max - box.y_min) / height;
  return n;
}

namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::pair<int, int> denormalize_span(double center, double extent, int size) {
  int lo = std::clamp(round_half_up((center - extent / 2.0) * size), 0, size);
  int hi = std::clamp(round_half_up((center + extent / 2.0) * size), 0, size);
  if (hi <= lo) {
    if (lo < size) {
      hi = lo + 1;
    } else {
      lo = size - 1;
      hi = size;
    }
  }
  return {lo, hi};
}

}  // namespace

PixelBBox from_normalized(const NormalizedBBox& box, int width, int height) {
  if (auto why = normalized_bbox_violation(box)) throw Error(Errc::OutOfRangeValue, *why);
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidArgument, "dimensions must be positive");
  const auto [x0, x1] = denormalize_span(box.cx, box.w, width);
  const auto [y0, y1] = denormalize_span(box.cy, box.h, height);
  return {x0, y0, x1, y1};
}

namespace {

constexpr long long kMicro = 1'000'000;

// Rounds a center/extent pair to micro-units, shrinking the extent when
// independent rounding would push an edge past the frame.
std::pair<long long, long long> quantize_span(double center, double extent) {
  const long long c = std::llround(center * kMicro);
  long long e = std::llround(extent * kMicro);
  e = std::min({e, 2 * c, 2 * (kMicro - c)});
  return {c, std::max<long long>(e, 1)};
}

void append_micro(std::string& out, long long u) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), " %lld.%06lld", u / kMicro, u % kMicro);
  out += buf;
}

}  // namespace

std::string format_label_line(const LabelRecord& r) {
  if (auto why = normalized_bbox_violation(r)) throw Error(Errc::OutOfRangeValue, *why);
  const auto [cx, w] = quantize_span(r.cx, r.w);
  const auto [cy, h] = quantize_span(r.cy, r.h);
  std::string out = std::to_string(r.class_id);
  append_micro(out, cx);
  append_micro(out, cy);
  append_micro(out, w);
  append_micro(out, h);
  return out;
}

std::string format_labels(std::span<const LabelRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += format_label_line(r);
    out += '\n';
  }
  return out;
}

std::filesystem::path write_label_file(std::span<const LabelRecord> records,
                                       std::string_view image_stem,
                                       const std::filesystem::path& labels_dir) {
  if (!std::filesystem::is_directory(labels_dir)) {
    throw Error(Errc::IoFailure, "labels directory does not exist: " + labels_dir.string());
  }
  const auto path = labels_dir / (std::string(image_stem) + ".txt");
  const std::string text = format_labels(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::IoFailure, "short write to " + path.string());
  return path;
}

namespace {

bool parse_int(std::string_view tok, int& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view tok, double& out) {
  // from_chars for floating point is missing from older libstdc++ releases.
  std::string s(tok);
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

std::vector<LabelRecord> parse_labels(std::string_view text) {
  std::vector<LabelRecord> records;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    if (tokens.empty()) continue;
    if (tokens.size() != 5) {
      throw LabelParseError(Errc::MalformedLine, line_no,
                            "expected 5 fields, found " + std::to_string(tokens.size()));
    }
    LabelRecord r;
    if (!parse_int(tokens[0], r.class_id)) {
      throw LabelParseError(Errc::MalformedLine, line_no, "class id is not an integer");
    }
    double* fields[] = {&r.cx, &r.cy, &r.w, &r.h};
    for (int f = 0; f < 4; ++f) {
      if (!parse_double(tokens[f + 1], *fields[f])) {
        throw LabelParseError(Errc::MalformedLine, line_no, "field " + std::to_string(f + 2) +
                                                                " is not a number");
      }
    }
    if (auto why = normalized_bbox_violation(r)) {
      throw LabelParseError(Errc::OutOfRangeValue, line_no, *why);
    }
    records.push_back(r);
  }
  return records;
}

std::vector<LabelRecord> parse_label_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labels(buf.str());
}

}  // namespace surgscan::dataset
