#pragma once

// Raster operations for augmentation and the upload pipeline.
//
// Every kernel here is the OpenMP-parallel production path. The serial
// reference kernels in imaging_reference.hpp compute the same values in the
// same floating-point order and are kept for equivalence tests and benchmarks.

#include <cstdint>
#include <span>
#include <vector>

#include "surgscan/core.hpp"

namespace surgscan::imaging {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Interleaved 8-bit RGB, row-major.
class Raster {
 public:
  static constexpr int kChannels = 3;

  Raster() = default;
  Raster(int width, int height, Rgb fill = {});
  Raster(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t* row(int y) noexcept { return data_.data() + index(0, y); }
  const std::uint8_t* row(int y) const noexcept { return data_.data() + index(0, y); }

  Rgb at(int x, int y) const noexcept {
    const std::uint8_t* p = data_.data() + index(x, y);
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    std::uint8_t* p = data_.data() + index(x, y);
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * kChannels;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Native capture size of the acquisition rig.
inline constexpr int kCaptureSize = 1600;

struct AugmentParams {
  std::vector<int> fixed_rotations = {90, 180, 270};
  double random_rotation_range = 20.0;  // degrees, sampled uniformly in [-r, r]
  double brightness_delta = 0.20;
  double contrast_delta = 0.20;
  double noise_sigma = 10.0;  // 8-bit units
  double unsharp_radius = 2.0;
  double unsharp_amount = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when a field leaves its documented range.
  void validate() const;
};

Raster resize_preserve_aspect(const Raster& img, int target_long_side);
Raster crop(const Raster& img, const PixelBBox& region);
Raster adjust_brightness_contrast(const Raster& img, double brightness, double contrast);
Raster add_gaussian_noise(const Raster& img, double sigma, std::uint64_t seed);
Raster unsharp_mask(const Raster& img, double radius, double amount);
/// Clockwise rotation by 90, 180 or 270 degrees; InvalidAngle otherwise.
Raster rotate_fixed(const Raster& img, int angle);
/// Rotation about the image center, positive angles clockwise on screen.
/// Canvas size is kept; samples that leave the frame take `fill`.
Raster rotate_arbitrary(const Raster& img, double degrees, Rgb fill = {});

/// Output dimensions for resize_preserve_aspect.
std::pair<int, int> aspect_preserving_size(int width, int height, int target_long_side);

/// Normalized Gaussian taps for sigma = radius, truncated at ceil(3 * radius).
std::vector<double> gaussian_kernel(double radius);

}  // namespace surgscan::imaging
