#pragma once

#include <cstdint>
#include <filesystem>

#include "openable/core/raster.hpp"

namespace openable {

struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB triples
};

/// 16-bit single-channel PNG (depth in millimeters by convention).
void write_png_gray16(const std::filesystem::path& path, const Raster<std::uint16_t>& image);
Raster<std::uint16_t> read_png_gray16(const std::filesystem::path& path);

void write_png_rgb8(const std::filesystem::path& path, const Rgb8Image& image);
Rgb8Image read_png_rgb8(const std::filesystem::path& path);

}  // namespace openable
