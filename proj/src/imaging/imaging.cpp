#include "surgscan/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "detail.hpp"

namespace surgscan::imaging {

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::InvalidArgument, "raster dimensions must be positive");
  }
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kChannels);
  for (std::size_t i = 0; i < data_.size(); i += kChannels) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::InvalidArgument, "raster dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * kChannels) {
    throw Error(Errc::InvalidArgument, "raster data length does not match dimensions");
  }
}

void AugmentParams::validate() const {
  for (int a : fixed_rotations) detail::check_fixed_angle(a);
  if (!(random_rotation_range >= 0.0 && random_rotation_range <= 45.0)) {
    throw Error(Errc::InvalidArgument, "random rotation range must lie in [0, 45]");
  }
  if (!(brightness_delta >= 0.0 && brightness_delta < 1.0) ||
      !(contrast_delta >= 0.0 && contrast_delta < 1.0)) {
    throw Error(Errc::InvalidArgument, "brightness/contrast deltas must lie in [0, 1)");
  }
  detail::check_sigma(noise_sigma);
  if (!(unsharp_amount >= 0.0)) throw Error(Errc::InvalidArgument, "unsharp amount must be >= 0");
  if (unsharp_amount > 0.0 && !(unsharp_radius > 0.0)) {
    throw Error(Errc::InvalidArgument, "unsharp radius must be > 0");
  }
}

std::pair<int, int> aspect_preserving_size(int width, int height, int target_long_side) {
  if (target_long_side < 1) throw Error(Errc::InvalidArgument, "target long side must be >= 1");
  const bool landscape = width >= height;
  const long long long_side = landscape ? width : height;
  const long long short_side = landscape ? height : width;
  // round(short * target / long), half-up, in exact integer arithmetic
  long long scaled = (2 * short_side * target_long_side + long_side) / (2 * long_side);
  scaled = std::max<long long>(scaled, 1);
  return landscape ? std::pair<int, int>{target_long_side, static_cast<int>(scaled)}
                   : std::pair<int, int>{static_cast<int>(scaled), target_long_side};
}

std::vector<double> gaussian_kernel(double radius) {
  const int half = static_cast<int>(std::ceil(3.0 * radius));
  std::vector<double> taps(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    taps[i + half] = std::exp(-(i * i) / (2.0 * radius * radius));
    sum += taps[i + half];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

Raster crop(const Raster& img, const PixelBBox& region) {
  validate_bbox(region, img.width(), img.height());
  Raster out(region.width(), region.height());
  const std::size_t row_bytes = static_cast<std::size_t>(region.width()) * Raster::kChannels;
  for (int y = 0; y < region.height(); ++y) {
    const std::uint8_t* src = img.row(region.y_min + y) + region.x_min * Raster::kChannels;
    std::copy(src, src + row_bytes, out.row(y));
  }
  return out;
}

Raster resize_preserve_aspect(const Raster& img, int target_long_side) {
  const auto [w, h] = aspect_preserving_size(img.width(), img.height(), target_long_side);
  if (w == img.width() && h == img.height()) return img;
  Raster out(w, h);
  const detail::ResizeMap map{static_cast<double>(img.width()) / w,
                              static_cast<double>(img.height()) / h, img.width(), img.height()};
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const double sy = map.src_y(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      detail::bilinear(img, map.src_x(x), sy, dst + x * Raster::kChannels);
    }
  }
  return out;
}

Raster adjust_brightness_contrast(const Raster& img, double brightness, double contrast) {
  detail::check_brightness_contrast(brightness, contrast);
  const auto lut = detail::brightness_contrast_lut(brightness, contrast);
  Raster out = img;
  auto data = out.data();
  const long long n = static_cast<long long>(data.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) data[i] = lut[data[i]];
  return out;
}

Raster add_gaussian_noise(const Raster& img, double sigma, std::uint64_t seed) {
  detail::check_sigma(sigma);
  if (sigma == 0.0) return img;
  Raster out = img;
  const int h = img.height();
  const int row_samples = img.width() * Raster::kChannels;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::mt19937_64 gen(detail::row_seed(seed, y));
    std::normal_distribution<double> noise(0.0, sigma);
    std::uint8_t* row = out.row(y);
    for (int i = 0; i < row_samples; ++i) row[i] = detail::round_clamp(row[i] + noise(gen));
  }
  return out;
}

Raster unsharp_mask(const Raster& img, double radius, double amount) {
  detail::check_unsharp(radius, amount);
  if (amount == 0.0) return img;
  const auto taps = gaussian_kernel(radius);
  const int half = static_cast<int>(taps.size() / 2);
  const int w = img.width();
  const int h = img.height();
  constexpr int C = Raster::kChannels;
  std::vector<double> horizontal(static_cast<std::size_t>(w) * h * C);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    // clamp-padded copy of the row so the tap loop has no branches
    std::vector<double> padded(static_cast<std::size_t>(w + 2 * half) * C);
    const std::uint8_t* src = img.row(y);
    for (int x = -half; x < w + half; ++x) {
      const int sx = std::clamp(x, 0, w - 1);
      for (int c = 0; c < C; ++c) padded[(x + half) * C + c] = src[sx * C + c];
    }
    double* dst = horizontal.data() + static_cast<std::size_t>(y) * w * C;
    for (int i = 0; i < w * C; ++i) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * half; ++k) acc += taps[k] * padded[i + k * C];
      dst[i] = acc;
    }
  }

  Raster out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::vector<double> blur(static_cast<std::size_t>(w) * C, 0.0);
    for (int k = -half; k <= half; ++k) {
      const int sy = std::clamp(y + k, 0, h - 1);
      const double t = taps[k + half];
      const double* line = horizontal.data() + static_cast<std::size_t>(sy) * w * C;
      for (int i = 0; i < w * C; ++i) blur[i] += t * line[i];
    }
    const std::uint8_t* src = img.row(y);
    std::uint8_t* dst = out.row(y);
    for (int i = 0; i < w * C; ++i) dst[i] = detail::round_clamp(src[i] + amount * (src[i] - blur[i]));
  }
  return out;
}

Raster rotate_fixed(const Raster& img, int angle) {
  detail::check_fixed_angle(angle);
  const int w = img.width();
  const int h = img.height();
  Raster out = angle == 180 ? Raster(w, h) : Raster(h, w);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto [tx, ty] = detail::fixed_rotation_target(x, y, w, h, angle);
      out.set(tx, ty, img.at(x, y));
    }
  }
  return out;
}

Raster rotate_arbitrary(const Raster& img, double degrees, Rgb fill) {
  detail::check_rotation(degrees);
  if (degrees == 0.0) return img;
  const detail::RotationMap map(img, degrees);
  Raster out(img.width(), img.height());
  const int w = img.width();
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      std::uint8_t* px = dst + x * Raster::kChannels;
      if (!map.sample(img, x, y, px)) {
        px[0] = fill.r;
        px[1] = fill.g;
        px[2] = fill.b;
      }
    }
  }
  return out;
}

}  // namespace surgscan::imaging
