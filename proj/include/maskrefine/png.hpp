#pragma once

// Minimal libpng wrapper: decode to raw samples without any color or gamma
// transformation, encode with fixed settings so output bytes are stable.

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "maskrefine/error.hpp"
#include "maskrefine/raster.hpp"

namespace maskrefine::png {

struct Image {
  Size size;
  int channels = 0;    // samples per pixel after decode
  int bit_depth = 0;   // 8 or 16 after decode; original depth in `file_depth`
  int file_depth = 0;
  bool palette = false;
  /// Row-major samples. 16-bit samples are stored native-endian in `wide`.
  std::vector<std::uint8_t> narrow;
  std::vector<std::uint16_t> wide;
};

namespace detail {

struct File {
  std::FILE* f = nullptr;
  explicit File(const std::string& path, const char* mode)
      : f(std::fopen(path.c_str(), mode)) {}
  ~File() {
    if (f) std::fclose(f);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
};

inline void on_error(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<std::string*>(png_get_error_ptr(png));
  if (buf) *buf = msg;
  png_longjmp(png, 1);
}

inline void on_warning(png_structp, png_const_charp) {}

}  // namespace detail

/// Reads `path` keeping raw sample values. Bit depths below 8 are unpacked
/// to one byte per sample without rescaling; palette images yield indices.
inline Image read(const std::string& path) {
  detail::File file(path, "rb");
  if (!file.f) throw IoError("cannot open " + path);
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw IoError(path + ": not a PNG file");

  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           detail::on_error, detail::on_warning);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png_create_info_struct failed");
  }

  Image img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path + ": " + err);
  }
  png_init_io(png, file.f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20) ||
      static_cast<std::uint64_t>(w) * h > (std::uint64_t{1} << 31)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path + ": dimension overflow");
  }
  img.size = {static_cast<int>(w), static_cast<int>(h)};
  img.file_depth = depth;
  img.palette = color == PNG_COLOR_TYPE_PALETTE;
  if (depth < 8) png_set_packing(png);
  if (depth == 16) png_set_swap(png);  // PNG is big-endian on disk
  png_read_update_info(png, info);
  img.channels = png_get_channels(png, info);
  img.bit_depth = depth == 16 ? 16 : 8;

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  const std::size_t samples = img.size.pixels() * img.channels;
  if (img.bit_depth == 16) {
    img.wide.resize(samples);
    for (png_uint_32 y = 0; y < h; ++y)
      rows.push_back(reinterpret_cast<png_bytep>(img.wide.data()) + y * row_bytes);
  } else {
    img.narrow.resize(samples);
    for (png_uint_32 y = 0; y < h; ++y)
      rows.push_back(img.narrow.data() + y * row_bytes);
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

/// Writes samples with a fixed compression setup and no ancillary chunks.
/// `samples` is row-major; 16-bit data is passed native-endian.
inline void write(const std::string& path, Size size, int channels,
                  int bit_depth, const void* samples) {
  require_valid_size(size);
  int color = 0;
  switch (channels) {
    case 1: color = PNG_COLOR_TYPE_GRAY; break;
    case 3: color = PNG_COLOR_TYPE_RGB; break;
    default: throw IoError("unsupported channel count");
  }
  detail::File file(path, "wb");
  if (!file.f) throw IoError("cannot write " + path);

  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            detail::on_error, detail::on_warning);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png_create_info_struct failed");
  }
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path + ": " + err);
  }
  png_init_io(png, file.f);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE | PNG_FILTER_SUB | PNG_FILTER_UP);
  png_set_IHDR(png, info, size.width, size.height, bit_depth, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  const std::size_t row_bytes =
      static_cast<std::size_t>(size.width) * channels * (bit_depth / 8);
  auto* base = static_cast<png_bytep>(const_cast<void*>(samples));
  for (int y = 0; y < size.height; ++y) rows.push_back(base + y * row_bytes);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.f) != 0) throw IoError("write failed for " + path);
}

}  // namespace maskrefine::png
