// Copyright 2026 The flowseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flowseg/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include "flowseg/error.hpp"

namespace flowseg {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngErrorState {
  char message[256] = {};
};

void png_error_handler(png_structp png, png_const_charp message) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", message);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

std::array<png_color, 256> voc_palette() {
  std::array<png_color, 256> pal{};
  for (int i = 0; i < 256; ++i) {
    int r = 0, g = 0, b = 0, c = i;
    for (int j = 0; j < 8; ++j) {
      r |= ((c >> 0) & 1) << (7 - j);
      g |= ((c >> 1) & 1) << (7 - j);
      b |= ((c >> 2) & 1) << (7 - j);
      c >>= 3;
    }
    pal[static_cast<std::size_t>(i)] = {static_cast<png_byte>(r), static_cast<png_byte>(g),
                                        static_cast<png_byte>(b)};
  }
  return pal;
}

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  if (mode[0] == 'w' && path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) {
    fail(mode[0] == 'r' ? ErrorCode::kMissingInput : ErrorCode::kIo,
         "cannot open " + path.string());
  }
  return f;
}

// Writes rows of 8-bit samples. Palette output when color_type is
// PNG_COLOR_TYPE_PALETTE. libpng reports errors via longjmp, so nothing with a
// destructor is created after setjmp.
void write_png(const std::filesystem::path& path, int height, int width, int color_type,
               std::span<const std::uint8_t> data, std::size_t row_bytes) {
  FilePtr file = open_file(path, "wb");
  PngErrorState state;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler,
                                            png_warning_handler);
  if (!png) fail(ErrorCode::kInternal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  const auto pal = voc_palette();
  volatile bool ok = false;
  if (info && setjmp(png_jmpbuf(png)) == 0) {
    png_init_io(png, file.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_PLTE(png, info, pal.data(), 256);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) {
      png_write_row(png, data.data() + static_cast<std::size_t>(y) * row_bytes);
    }
    png_write_end(png, nullptr);
    ok = true;
  }
  png_destroy_write_struct(&png, &info);
  if (!ok) fail(ErrorCode::kIo, "writing " + path.string() + ": " + state.message);
}

struct DecodedPng {
  int height = 0;
  int width = 0;
  int color_type = 0;
  std::vector<std::uint8_t> data;
};

DecodedPng read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  PngErrorState state;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler,
                                           png_warning_handler);
  if (!png) fail(ErrorCode::kInternal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  DecodedPng out;
  std::vector<png_bytep> rows;
  volatile bool ok = false;
  if (info && setjmp(png_jmpbuf(png)) == 0) {
    png_init_io(png, file.get());
    png_read_info(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    out.color_type = png_get_color_type(png, info);
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    if (bit_depth == 16) png_set_strip_16(png);
    if (bit_depth < 8) png_set_packing(png);
    if (out.color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    out.data.resize(row_bytes * static_cast<std::size_t>(out.height));
    rows.resize(static_cast<std::size_t>(out.height));
    for (int y = 0; y < out.height; ++y) {
      rows[static_cast<std::size_t>(y)] = out.data.data() + static_cast<std::size_t>(y) * row_bytes;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    ok = true;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) fail(ErrorCode::kFormat, "reading " + path.string() + ": " + state.message);
  return out;
}

}  // namespace

std::uint8_t LabelMap::max_label() const noexcept {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

void write_label_png(const std::filesystem::path& path, const LabelMap& map) {
  if (map.height < 1 || map.width < 1 ||
      map.labels.size() != static_cast<std::size_t>(map.height) * static_cast<std::size_t>(map.width)) {
    fail(ErrorCode::kShape, "label map size mismatch");
  }
  write_png(path, map.height, map.width, PNG_COLOR_TYPE_PALETTE, map.labels,
            static_cast<std::size_t>(map.width));
}

LabelMap read_label_png(const std::filesystem::path& path) {
  DecodedPng png = read_png(path);
  if (png.color_type != PNG_COLOR_TYPE_PALETTE && png.color_type != PNG_COLOR_TYPE_GRAY) {
    fail(ErrorCode::kFormat, path.string() + " is not a palette or grayscale PNG");
  }
  return LabelMap{png.height, png.width, std::move(png.data)};
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  if (image.pixels.size() != static_cast<std::size_t>(image.height) * static_cast<std::size_t>(image.width) * 3) {
    fail(ErrorCode::kShape, "rgb image size mismatch");
  }
  write_png(path, image.height, image.width, PNG_COLOR_TYPE_RGB, image.pixels,
            static_cast<std::size_t>(image.width) * 3);
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  DecodedPng png = read_png(path);
  if (png.color_type != PNG_COLOR_TYPE_RGB) fail(ErrorCode::kFormat, path.string() + " is not RGB");
  return RgbImage{png.height, png.width, std::move(png.data)};
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  auto bytes = mask.to_bytes();
  for (auto& b : bytes) b = b ? 255 : 0;
  write_png(path, mask.height(), mask.width(), PNG_COLOR_TYPE_GRAY, bytes,
            static_cast<std::size_t>(mask.width()));
}

Mask read_mask_png(const std::filesystem::path& path) {
  const LabelMap map = read_label_png(path);
  return Mask::from_bytes(map.height, map.width, map.labels);
}

LabelMap masks_to_labels(std::span<const Mask> masks, int height, int width) {
  if (masks.size() > 255) fail(ErrorCode::kParameter, "at most 255 objects fit a label map");
  LabelMap map{height, width,
               std::vector<std::uint8_t>(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0)};
  for (std::size_t k = 0; k < masks.size(); ++k) {
    const Mask& m = masks[k];
    if (m.height() != height || m.width() != width) fail(ErrorCode::kShape, "mask/label map shape mismatch");
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (!m.get(x, y)) continue;
        auto& cell = map.labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                static_cast<std::size_t>(x)];
        if (cell != 0) fail(ErrorCode::kInvalidInput, "overlapping masks cannot form a label map");
        cell = static_cast<std::uint8_t>(k + 1);
      }
    }
  }
  return map;
}

std::vector<Mask> labels_to_masks(const LabelMap& map, std::size_t count) {
  std::vector<Mask> masks(count, Mask(map.height, map.width));
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const std::uint8_t l = map.labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(map.width) +
                                        static_cast<std::size_t>(x)];
      if (l != 0 && l <= count) masks[l - 1u].set(x, y);
    }
  }
  return masks;
}

}  // namespace flowseg
