#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surgscan/dataset/manifest.hpp"
#include "surgscan/imaging.hpp"

namespace surgscan::dataset {

/// One augmentation step with its sampled parameters. The descriptor string
/// is recorded in each derivative's provenance and parses back to the same
/// transform.
struct Transform {
  enum class Kind { Rotate90, Rotate180, Rotate270, Rotate, BrightnessContrast, Noise, Unsharp };

  Kind kind = Kind::Rotate90;
  double first = 0.0;   // degrees | brightness | sigma | radius
  double second = 0.0;  // contrast | amount
  std::uint64_t seed = 0;

  static Transform rotate_fixed(int angle);
  static Transform rotate(double degrees);
  static Transform brightness_contrast(double brightness, double contrast);
  static Transform noise(double sigma, std::uint64_t seed);
  static Transform unsharp(double radius, double amount);

  /// e.g. "rot90", "rotate:-12.500000", "bc:0.100000:-0.050000",
  /// "noise:10.000000:42", "unsharp:2.000000:1.000000"
  std::string descriptor() const;
  /// Short name used in derivative ids.
  std::string_view tag() const;
  bool is_geometric() const noexcept;

  static Transform parse(std::string_view descriptor);

  friend bool operator==(const Transform&, const Transform&) = default;
};

inline constexpr double kDefaultMinBoxKeep = 0.25;

/// Maps a normalized box through the transform. Photometric transforms are
/// the identity. Arbitrary rotation takes the axis-aligned hull of the
/// rotated corners (in pixel space, which is why the image size is needed),
/// clips to the frame and returns nullopt when less than min_keep of the
/// original box area survives.
std::optional<NormalizedBBox> transform_bbox(const NormalizedBBox& box, const Transform& t,
                                             int width, int height,
                                             double min_keep = kDefaultMinBoxKeep);

imaging::Raster apply_transform(const imaging::Raster& img, const Transform& t);

/// Transforms enabled by the params, with parameters sampled deterministically
/// from (params.seed, image_id). Order: fixed rotations, random rotation,
/// brightness/contrast, noise, unsharp. A zero magnitude disables a step.
std::vector<Transform> plan_transforms(const imaging::AugmentParams& params,
                                       std::string_view image_id);

/// Expands every Train original into one derivative per planned transform,
/// writing PNGs to output_dir. Derivatives are appended with split=Train.
/// Runs in parallel per image; output is independent of thread count.
DatasetManifest augment_dataset(const DatasetManifest& manifest,
                                const imaging::AugmentParams& params,
                                const std::filesystem::path& output_dir,
                                double min_box_keep = kDefaultMinBoxKeep);

}  // namespace surgscan::dataset
