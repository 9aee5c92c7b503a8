#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "surgscan/imaging.hpp"

namespace surgscan::imaging {

enum class ImageFormat { Png, Jpeg, Unknown };

ImageFormat sniff_format(std::span<const std::uint8_t> bytes);

/// Decodes PNG or JPEG to 8-bit RGB (grayscale and alpha inputs are
/// converted). Throws BadImage on anything else.
Raster decode_image(std::span<const std::uint8_t> bytes);
Raster load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Raster& img);
std::vector<std::uint8_t> encode_jpeg(const Raster& img, int quality = 95);
void save_png(const Raster& img, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace surgscan::imaging
