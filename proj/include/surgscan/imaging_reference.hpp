#pragma once

// Serial reference kernels. Same contracts as imaging.hpp, single-threaded.

#include "surgscan/imaging.hpp"

namespace surgscan::imaging::reference {

Raster resize_preserve_aspect(const Raster& img, int target_long_side);
Raster adjust_brightness_contrast(const Raster& img, double brightness, double contrast);
Raster add_gaussian_noise(const Raster& img, double sigma, std::uint64_t seed);
Raster unsharp_mask(const Raster& img, double radius, double amount);
Raster rotate_fixed(const Raster& img, int angle);
Raster rotate_arbitrary(const Raster& img, double degrees, Rgb fill = {});

}  // namespace surgscan::imaging::reference
