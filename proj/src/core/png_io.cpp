#include "openable/core/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "openable/core/error.hpp"

namespace openable {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; everything touched between setjmp and the
// jump is POD or owned outside this frame.
void write_png(const std::filesystem::path& path, int width, int height, int color_type,
               int bit_depth, const std::vector<png_bytep>& rows) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error("cannot write " + path.string());
  std::string what;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &what, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG write failed for " + path.string() + ": " + what);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // rows are host little-endian
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> bytes;
};

Decoded read_png(const std::filesystem::path& path, bool want16) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw LoadError("cannot open image " + path.string());
  std::string what;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &what, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw LoadError("libpng allocation failed");
  }
  Decoded out;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw LoadError("PNG decode failed for " + path.string() + ": " + what);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (want16) {
    if (depth < 16) {
      png_destroy_read_struct(&png, &info, nullptr);
      throw LoadError(path.string() + ": expected a 16-bit depth image");
    }
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_set_swap(png);
  } else {
    if (depth == 16) png_set_strip_16(png);
    if (!(color & PNG_COLOR_MASK_COLOR)) png_set_gray_to_rgb(png);
  }
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.bytes.resize(rowbytes * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + rowbytes * y;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void write_png_gray16(const std::filesystem::path& path, const Raster<std::uint16_t>& image) {
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  auto* base = reinterpret_cast<png_bytep>(const_cast<std::uint16_t*>(image.data().data()));
  for (int y = 0; y < image.height(); ++y) rows[y] = base + 2 * static_cast<std::size_t>(image.width()) * y;
  write_png(path, image.width(), image.height(), PNG_COLOR_TYPE_GRAY, 16, rows);
}

Raster<std::uint16_t> read_png_gray16(const std::filesystem::path& path) {
  const Decoded d = read_png(path, true);
  if (d.channels != 1 || d.bit_depth != 16) {
    throw LoadError(path.string() + ": expected single-channel 16-bit PNG");
  }
  Raster<std::uint16_t> out(d.width, d.height);
  std::memcpy(out.data().data(), d.bytes.data(), out.size() * 2);
  return out;
}

void write_png_rgb8(const std::filesystem::path& path, const Rgb8Image& image) {
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  auto* base = const_cast<png_bytep>(image.pixels.data());
  for (int y = 0; y < image.height; ++y) rows[y] = base + 3 * static_cast<std::size_t>(image.width) * y;
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 8, rows);
}

Rgb8Image read_png_rgb8(const std::filesystem::path& path) {
  Decoded d = read_png(path, false);
  if (d.channels != 3) throw LoadError(path.string() + ": expected RGB PNG");
  return {d.width, d.height, std::move(d.bytes)};
}

}  // namespace openable
