#include "surgscan/dataset/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <random>

#include "surgscan/codec.hpp"
#include "hashing.hpp"

namespace surgscan::dataset {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double quantize6(double v) { return std::strtod(fixed6(v).c_str(), nullptr); }

std::vector<std::string_view> split_colon(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(':', pos);
    parts.push_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double to_double(std::string_view s, std::string_view descriptor) {
  std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size()) {
    throw Error(Errc::InvalidArgument, "bad transform descriptor '" + std::string(descriptor) + "'");
  }
  return v;
}

}  // namespace

Transform Transform::rotate_fixed(int angle) {
  switch (angle) {
    case 90: return {Kind::Rotate90};
    case 180: return {Kind::Rotate180};
    case 270: return {Kind::Rotate270};
    default: break;
  }
  throw Error(Errc::InvalidAngle, "fixed rotation must be 90, 180 or 270");
}

Transform Transform::rotate(double degrees) { return {Kind::Rotate, quantize6(degrees)}; }

Transform Transform::brightness_contrast(double brightness, double contrast) {
  return {Kind::BrightnessContrast, quantize6(brightness), quantize6(contrast)};
}

Transform Transform::noise(double sigma, std::uint64_t seed) {
  return {Kind::Noise, quantize6(sigma), 0.0, seed};
}

Transform Transform::unsharp(double radius, double amount) {
  return {Kind::Unsharp, quantize6(radius), quantize6(amount)};
}

std::string Transform::descriptor() const {
  switch (kind) {
    case Kind::Rotate90: return "rot90";
    case Kind::Rotate180: return "rot180";
    case Kind::Rotate270: return "rot270";
    case Kind::Rotate: return "rotate:" + fixed6(first);
    case Kind::BrightnessContrast: return "bc:" + fixed6(first) + ":" + fixed6(second);
    case Kind::Noise: return "noise:" + fixed6(first) + ":" + std::to_string(seed);
    case Kind::Unsharp: return "unsharp:" + fixed6(first) + ":" + fixed6(second);
  }
  return {};
}

std::string_view Transform::tag() const {
  switch (kind) {
    case Kind::Rotate90: return "rot90";
    case Kind::Rotate180: return "rot180";
    case Kind::Rotate270: return "rot270";
    case Kind::Rotate: return "rotate";
    case Kind::BrightnessContrast: return "bc";
    case Kind::Noise: return "noise";
    case Kind::Unsharp: return "unsharp";
  }
  return {};
}

bool Transform::is_geometric() const noexcept {
  return kind == Kind::Rotate90 || kind == Kind::Rotate180 || kind == Kind::Rotate270 ||
         kind == Kind::Rotate;
}

Transform Transform::parse(std::string_view d) {
  const auto parts = split_colon(d);
  const auto head = parts.front();
  auto need = [&](std::size_t n) {
    if (parts.size() != n) {
      throw Error(Errc::InvalidArgument, "bad transform descriptor '" + std::string(d) + "'");
    }
  };
  if (head == "rot90" || head == "rot180" || head == "rot270") {
    need(1);
    return rotate_fixed(head == "rot90" ? 90 : head == "rot180" ? 180 : 270);
  }
  if (head == "rotate") {
    need(2);
    return rotate(to_double(parts[1], d));
  }
  if (head == "bc") {
    need(3);
    return brightness_contrast(to_double(parts[1], d), to_double(parts[2], d));
  }
  if (head == "noise") {
    need(3);
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(std::string(parts[2]));
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, "bad transform descriptor '" + std::string(d) + "'");
    }
    return noise(to_double(parts[1], d), seed);
  }
  if (head == "unsharp") {
    need(3);
    return unsharp(to_double(parts[1], d), to_double(parts[2], d));
  }
  throw Error(Errc::InvalidArgument, "unknown transform '" + std::string(d) + "'");
}

std::optional<NormalizedBBox> transform_bbox(const NormalizedBBox& n, const Transform& t, int width,
                                             int height, double min_keep) {
  NormalizedBBox out = n;
  switch (t.kind) {
    case Transform::Kind::Rotate90:
      out.cx = 1.0 - n.cy;
      out.cy = n.cx;
      out.w = n.h;
      out.h = n.w;
      return out;
    case Transform::Kind::Rotate180:
      out.cx = 1.0 - n.cx;
      out.cy = 1.0 - n.cy;
      return out;
    case Transform::Kind::Rotate270:
      out.cx = n.cy;
      out.cy = 1.0 - n.cx;
      out.w = n.h;
      out.h = n.w;
      return out;
    case Transform::Kind::BrightnessContrast:
    case Transform::Kind::Noise:
    case Transform::Kind::Unsharp:
      return out;
    case Transform::Kind::Rotate:
      break;
  }
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidArgument, "dimensions must be positive");
  if (t.first == 0.0) return out;

  const double W = width;
  const double H = height;
  const double theta = t.first * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double px = W / 2.0;
  const double py = H / 2.0;
  const double x0 = (n.cx - n.w / 2) * W, x1 = (n.cx + n.w / 2) * W;
  const double y0 = (n.cy - n.h / 2) * H, y1 = (n.cy + n.h / 2) * H;

  double lo_x = W, hi_x = 0.0, lo_y = H, hi_y = 0.0;
  bool first = true;
  for (double x : {x0, x1}) {
    for (double y : {y0, y1}) {
      const double dx = x - px;
      const double dy = y - py;
      const double rx = px + dx * c - dy * s;
      const double ry = py + dx * s + dy * c;
      if (first) {
        lo_x = hi_x = rx;
        lo_y = hi_y = ry;
        first = false;
      } else {
        lo_x = std::min(lo_x, rx);
        hi_x = std::max(hi_x, rx);
        lo_y = std::min(lo_y, ry);
        hi_y = std::max(hi_y, ry);
      }
    }
  }
  lo_x = std::clamp(lo_x, 0.0, W);
  hi_x = std::clamp(hi_x, 0.0, W);
  lo_y = std::clamp(lo_y, 0.0, H);
  hi_y = std::clamp(hi_y, 0.0, H);
  const double clipped_area = (hi_x - lo_x) * (hi_y - lo_y);
  const double original_area = (x1 - x0) * (y1 - y0);
  if (clipped_area <= 0.0 || clipped_area < min_keep * original_area) return std::nullopt;

  out.cx = (lo_x + hi_x) / (2.0 * W);
  out.cy = (lo_y + hi_y) / (2.0 * H);
  out.w = (hi_x - lo_x) / W;
  out.h = (hi_y - lo_y) / H;
  return out;
}

imaging::Raster apply_transform(const imaging::Raster& img, const Transform& t) {
  switch (t.kind) {
    case Transform::Kind::Rotate90: return imaging::rotate_fixed(img, 90);
    case Transform::Kind::Rotate180: return imaging::rotate_fixed(img, 180);
    case Transform::Kind::Rotate270: return imaging::rotate_fixed(img, 270);
    case Transform::Kind::Rotate: return imaging::rotate_arbitrary(img, t.first);
    case Transform::Kind::BrightnessContrast:
      return imaging::adjust_brightness_contrast(img, t.first, t.second);
    case Transform::Kind::Noise: return imaging::add_gaussian_noise(img, t.first, t.seed);
    case Transform::Kind::Unsharp: return imaging::unsharp_mask(img, t.first, t.second);
  }
  return img;
}

std::vector<Transform> plan_transforms(const imaging::AugmentParams& params,
                                       std::string_view image_id) {
  params.validate();
  std::mt19937_64 gen(detail::splitmix64(params.seed ^ detail::fnv1a(image_id)));
  auto uniform = [&](double range) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
    return (2.0 * u - 1.0) * range;
  };

  std::vector<Transform> plan;
  for (int angle : params.fixed_rotations) plan.push_back(Transform::rotate_fixed(angle));
  if (params.random_rotation_range > 0.0) {
    plan.push_back(Transform::rotate(uniform(params.random_rotation_range)));
  }
  if (params.brightness_delta > 0.0 || params.contrast_delta > 0.0) {
    const double b = uniform(params.brightness_delta);
    const double c = uniform(params.contrast_delta);
    plan.push_back(Transform::brightness_contrast(b, c));
  }
  if (params.noise_sigma > 0.0) plan.push_back(Transform::noise(params.noise_sigma, gen()));
  if (params.unsharp_amount > 0.0) {
    plan.push_back(Transform::unsharp(params.unsharp_radius, params.unsharp_amount));
  }
  return plan;
}

namespace {

std::pair<int, int> output_size(const AnnotatedImage& e, const Transform& t) {
  if (t.kind == Transform::Kind::Rotate90 || t.kind == Transform::Kind::Rotate270) {
    return {e.height, e.width};
  }
  return {e.width, e.height};
}

std::vector<AnnotatedImage> expand_one(const AnnotatedImage& original,
                                       const imaging::AugmentParams& params,
                                       const std::filesystem::path& output_dir, double min_keep) {
  const imaging::Raster source = imaging::load_image(original.path);
  if (source.width() != original.width || source.height() != original.height) {
    throw Error(Errc::InvalidArgument, "image '" + original.path + "' is " +
                                           std::to_string(source.width()) + "x" +
                                           std::to_string(source.height()) +
                                           ", manifest says " + std::to_string(original.width) +
                                           "x" + std::to_string(original.height));
  }
  std::vector<AnnotatedImage> derived;
  for (const Transform& t : plan_transforms(params, original.id)) {
    AnnotatedImage d;
    d.id = original.id + "__" + std::string(t.tag());
    d.path = (output_dir / (d.id + ".png")).string();
    std::tie(d.width, d.height) = output_size(original, t);
    d.instrument = original.instrument;
    d.provenance = AugmentedProvenance{original.id, t.descriptor()};
    for (const auto& ann : original.defects) {
      const NormalizedBBox n = to_normalized(ann.box, 0, original.width, original.height);
      if (auto moved = transform_bbox(n, t, original.width, original.height, min_keep)) {
        d.defects.push_back({ann.defect, from_normalized(*moved, d.width, d.height)});
      }
    }
    imaging::save_png(apply_transform(source, t), d.path);
    derived.push_back(std::move(d));
  }
  return derived;
}

}  // namespace

DatasetManifest augment_dataset(const DatasetManifest& manifest,
                                const imaging::AugmentParams& params,
                                const std::filesystem::path& output_dir, double min_box_keep) {
  params.validate();
  manifest.validate(false);
  std::vector<const AnnotatedImage*> train;
  for (const auto& e : manifest.entries) {
    if (!e.is_original()) {
      throw Error(Errc::AlreadyAugmented, "manifest already contains augmented entry '" + e.id + "'");
    }
    auto it = manifest.split.find(e.id);
    if (it == manifest.split.end()) throw Error(Errc::NotSplit, "no split assigned to '" + e.id + "'");
    if (it->second == Split::Train) train.push_back(&e);
  }

  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + output_dir.string() + ": " + ec.message());

  std::vector<std::vector<AnnotatedImage>> derived(train.size());
  std::exception_ptr failure;
  const long long n = static_cast<long long>(train.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      derived[i] = expand_one(*train[i], params, output_dir, min_box_keep);
    } catch (...) {
#pragma omp critical(surgscan_augment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  DatasetManifest out = manifest;
  for (auto& batch : derived) {
    for (auto& d : batch) {
      out.split[d.id] = Split::Train;
      out.entries.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace surgscan::dataset
