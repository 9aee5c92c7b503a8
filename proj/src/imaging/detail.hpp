#pragma once

// Per-sample arithmetic shared by the parallel and reference kernels. Both
// paths call these helpers so their outputs agree bit for bit; only the loop
// scheduling differs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "surgscan/imaging.hpp"

namespace surgscan::imaging::detail {

inline std::uint8_t round_clamp(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

inline std::array<std::uint8_t, 256> brightness_contrast_lut(double brightness, double contrast) {
  std::array<std::uint8_t, 256> lut{};
  for (int v = 0; v < 256; ++v) {
    lut[v] = round_clamp((v * (1.0 + brightness) - 128.0) * (1.0 + contrast) + 128.0);
  }
  return lut;
}

inline void check_brightness_contrast(double brightness, double contrast) {
  if (!(std::abs(brightness) < 1.0) || !(std::abs(contrast) < 1.0)) {
    throw Error(Errc::InvalidArgument, "brightness and contrast must lie in (-1, 1)");
  }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator seed for one raster row.
inline std::uint64_t row_seed(std::uint64_t seed, int row) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(row) + 1));
}

inline void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::InvalidArgument, "noise sigma must be >= 0");
  }
}

inline void check_unsharp(double radius, double amount) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(Errc::InvalidArgument, "unsharp radius must be > 0");
  }
  if (!(amount >= 0.0) || !std::isfinite(amount)) {
    throw Error(Errc::InvalidArgument, "unsharp amount must be >= 0");
  }
}

inline void check_fixed_angle(int angle) {
  if (angle != 90 && angle != 180 && angle != 270) {
    throw Error(Errc::InvalidAngle, "fixed rotation must be 90, 180 or 270 degrees, got " +
                                        std::to_string(angle));
  }
}

/// Destination coordinates of source pixel (x, y) under a clockwise fixed
/// rotation of a width x height raster.
inline std::pair<int, int> fixed_rotation_target(int x, int y, int width, int height, int angle) {
  switch (angle) {
    case 90: return {height - 1 - y, x};
    case 180: return {width - 1 - x, height - 1 - y};
    default: return {y, width - 1 - x};  // 270
  }
}

/// Bilinear sample at (sx, sy), coordinates already clamped to the frame.
inline void bilinear(const Raster& img, double sx, double sy, std::uint8_t* out) {
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const std::uint8_t* a = img.row(y0) + x0 * Raster::kChannels;
  const std::uint8_t* b = img.row(y0) + x1 * Raster::kChannels;
  const std::uint8_t* c = img.row(y1) + x0 * Raster::kChannels;
  const std::uint8_t* d = img.row(y1) + x1 * Raster::kChannels;
  for (int ch = 0; ch < Raster::kChannels; ++ch) {
    const double top = (1.0 - fx) * a[ch] + fx * b[ch];
    const double bottom = (1.0 - fx) * c[ch] + fx * d[ch];
    out[ch] = round_clamp((1.0 - fy) * top + fy * bottom);
  }
}

struct ResizeMap {
  double scale_x;
  double scale_y;
  int src_w;
  int src_h;

  double src_x(int x) const {
    return std::clamp((x + 0.5) * scale_x - 0.5, 0.0, static_cast<double>(src_w - 1));
  }
  double src_y(int y) const {
    return std::clamp((y + 0.5) * scale_y - 0.5, 0.0, static_cast<double>(src_h - 1));
  }
};

struct RotationMap {
  double cos_t;
  double sin_t;
  double cx;
  double cy;
  double max_x;
  double max_y;

  RotationMap(const Raster& img, double degrees) {
    const double t = degrees * std::numbers::pi / 180.0;
    cos_t = std::cos(t);
    sin_t = std::sin(t);
    cx = (img.width() - 1) / 2.0;
    cy = (img.height() - 1) / 2.0;
    max_x = img.width() - 1;
    max_y = img.height() - 1;
  }

  /// Samples the source for destination (x, y); returns false when the
  /// source location lies outside the frame.
  bool sample(const Raster& img, int x, int y, std::uint8_t* out) const {
    constexpr double eps = 1e-9;
    const double dx = x - cx;
    const double dy = y - cy;
    double sx = cos_t * dx + sin_t * dy + cx;
    double sy = -sin_t * dx + cos_t * dy + cy;
    if (sx < -eps || sy < -eps || sx > max_x + eps || sy > max_y + eps) return false;
    sx = std::clamp(sx, 0.0, max_x);
    sy = std::clamp(sy, 0.0, max_y);
    bilinear(img, sx, sy, out);
    return true;
  }
};

inline void check_rotation(double degrees) {
  if (!(std::abs(degrees) <= 45.0)) {
    throw Error(Errc::InvalidArgument, "arbitrary rotation limited to +/-45 degrees");
  }
}

}  // namespace surgscan::imaging::detail
