#include "surgscan/imaging_reference.hpp"

#include <algorithm>
#include <random>

#include "detail.hpp"

namespace surgscan::imaging::reference {

Raster resize_preserve_aspect(const Raster& img, int target_long_side) {
  const auto [w, h] = aspect_preserving_size(img.width(), img.height(), target_long_side);
  if (w == img.width() && h == img.height()) return img;
  Raster out(w, h);
  const detail::ResizeMap map{static_cast<double>(img.width()) / w,
                              static_cast<double>(img.height()) / h, img.width(), img.height()};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t px[3];
      detail::bilinear(img, map.src_x(x), map.src_y(y), px);
      out.set(x, y, {px[0], px[1], px[2]});
    }
  }
  return out;
}

Raster adjust_brightness_contrast(const Raster& img, double brightness, double contrast) {
  detail::check_brightness_contrast(brightness, contrast);
  Raster out = img;
  for (auto& v : out.data()) {
    v = detail::round_clamp((v * (1.0 + brightness) - 128.0) * (1.0 + contrast) + 128.0);
  }
  return out;
}

Raster add_gaussian_noise(const Raster& img, double sigma, std::uint64_t seed) {
  detail::check_sigma(sigma);
  if (sigma == 0.0) return img;
  Raster out = img;
  for (int y = 0; y < img.height(); ++y) {
    std::mt19937_64 gen(detail::row_seed(seed, y));
    std::normal_distribution<double> noise(0.0, sigma);
    std::uint8_t* row = out.row(y);
    for (int i = 0; i < img.width() * Raster::kChannels; ++i) {
      row[i] = detail::round_clamp(row[i] + noise(gen));
    }
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

  auto sample = [&](int x, int y, int c) { return img.row(y)[x * C + c]; };
  std::vector<double> horizontal(static_cast<std::size_t>(w) * h * C);
  auto hz = [&](int x, int y, int c) -> double& {
    return horizontal[(static_cast<std::size_t>(y) * w + x) * C + c];
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k) {
          acc += taps[k + half] * sample(std::clamp(x + k, 0, w - 1), y, c);
        }
        hz(x, y, c) = acc;
      }
    }
  }

  Raster out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < C; ++c) {
        double blur = 0.0;
        for (int k = -half; k <= half; ++k) {
          blur += taps[k + half] * hz(x, std::clamp(y + k, 0, h - 1), c);
        }
        const double v = sample(x, y, c);
        out.row(y)[x * C + c] = detail::round_clamp(v + amount * (v - blur));
      }
    }
  }
  return out;
}

Raster rotate_fixed(const Raster& img, int angle) {
  detail::check_fixed_angle(angle);
  const int w = img.width();
  const int h = img.height();
  Raster out = angle == 180 ? Raster(w, h) : Raster(h, w);
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
  Raster out(img.width(), img.height(), fill);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      std::uint8_t px[3];
      if (map.sample(img, x, y, px)) out.set(x, y, {px[0], px[1], px[2]});
    }
  }
  return out;
}

}  // namespace surgscan::imaging::reference
