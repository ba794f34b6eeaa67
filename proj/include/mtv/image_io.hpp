// Copyright 2026 The mtvkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <png.h>

#include "mtv/errors.hpp"
#include "mtv/frame.hpp"
#include "mtv/mask.hpp"
#include "mtv/util.hpp"

namespace mtv {

// Fixed encoder settings so repeated runs emit byte-identical files. Level 1
// with no row filtering is the fast end of zlib; trail frames and masks are
// mostly runs of equal bytes, so heavier settings buy little.
inline constexpr int kPngCompressionLevel = 1;

namespace detail {

struct PngByteReader {
  const char* data;
  std::size_t size;
  std::size_t pos;
};

inline void png_append_bytes(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), n);
}

inline void png_flush_noop(png_structp) {}

inline void png_consume_bytes(png_structp png, png_bytep out, png_size_t n) {
  auto* reader = static_cast<PngByteReader*>(png_get_io_ptr(png));
  if (reader->pos + n > reader->size) png_error(png, "truncated PNG stream");
  std::memcpy(out, reader->data + reader->pos, n);
  reader->pos += n;
}

// Shared writer; `gray` selects 8-bit grayscale vs 8-bit RGB.
inline std::string encode_png(const std::uint8_t* pixels, int width, int height, bool gray) {
  const std::size_t stride = static_cast<std::size_t>(width) * (gray ? 1 : 3);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: cannot allocate write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng: cannot allocate info struct");
  }
  std::string out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y)
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(pixels + y * stride);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng: encode failed");
  }
  png_set_write_fn(png, &out, &png_append_bytes, &png_flush_noop);
  png_set_compression_level(png, kPngCompressionLevel);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               gray ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// Shared reader; normalizes any PNG to 8-bit gray or 8-bit RGB.
inline std::vector<std::uint8_t> decode_png(std::string_view bytes, bool gray, int& width,
                                            int& height) {
  if (bytes.size() < 8 ||
      png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0)
    throw IoError("not a PNG stream");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: cannot allocate read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng: cannot allocate info struct");
  }
  PngByteReader reader{bytes.data(), bytes.size(), 0};
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng: decode failed (malformed image)");
  }
  png_set_read_fn(png, &reader, &png_consume_bytes);
  png_read_info(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (gray) {
    if (color_type & PNG_COLOR_MASK_COLOR)
      png_set_rgb_to_gray_fixed(png, 1 /*silent*/, -1, -1);
  } else {
    if (!(color_type & PNG_COLOR_MASK_COLOR)) png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  const std::size_t stride = static_cast<std::size_t>(width) * (gray ? 1 : 3);
  if (width < 1 || height < 1 || png_get_rowbytes(png, info) != stride) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decode: unexpected layout after normalization");
  }
  pixels.resize(stride * static_cast<std::size_t>(height));
  rows.resize(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) rows[static_cast<std::size_t>(y)] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return pixels;
}

}  // namespace detail

inline std::string encode_frame_png(const Frame& frame) {
  if (frame.width < 1 || frame.height < 1 ||
      frame.rgb.size() != static_cast<std::size_t>(frame.width) * frame.height * 3)
    throw InvalidParameter("encode_frame_png: inconsistent frame dimensions");
  return detail::encode_png(frame.rgb.data(), frame.width, frame.height, /*gray=*/false);
}

inline Frame decode_frame_png(std::string_view bytes) {
  Frame frame;
  frame.rgb = detail::decode_png(bytes, /*gray=*/false, frame.width, frame.height);
  return frame;
}

// Raw 8-bit grayscale encode; masks go through it with levels {0, 255}.
inline std::string encode_gray8_png(const std::vector<std::uint8_t>& levels, int width,
                                    int height) {
  if (width < 1 || height < 1 ||
      levels.size() != static_cast<std::size_t>(width) * height)
    throw InvalidParameter("encode_gray8_png: inconsistent dimensions");
  return detail::encode_png(levels.data(), width, height, /*gray=*/true);
}

inline std::string encode_mask_png(const Mask& mask) {
  if (mask.width < 1 || mask.height < 1 ||
      mask.data.size() != static_cast<std::size_t>(mask.width) * mask.height)
    throw InvalidParameter("encode_mask_png: inconsistent mask dimensions");
  std::vector<std::uint8_t> levels(mask.data.size());
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = mask.data[i] ? 255 : 0;
  return detail::encode_png(levels.data(), mask.width, mask.height, /*gray=*/true);
}

// Gray level > 127 reads as foreground.
inline Mask decode_mask_png(std::string_view bytes) {
  Mask mask;
  std::vector<std::uint8_t> levels = detail::decode_png(bytes, /*gray=*/true, mask.width,
                                                        mask.height);
  mask.data.resize(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) mask.data[i] = levels[i] > 127 ? 1 : 0;
  return mask;
}

inline void save_frame_png(const std::filesystem::path& path, const Frame& frame) {
  write_file(path, encode_frame_png(frame));
}

inline Frame load_frame_png(const std::filesystem::path& path) {
  return decode_frame_png(read_file(path));
}

inline void save_mask_png(const std::filesystem::path& path, const Mask& mask) {
  write_file(path, encode_mask_png(mask));
}

inline Mask load_mask_png(const std::filesystem::path& path) {
  return decode_mask_png(read_file(path));
}

}  // namespace mtv
