// Copyright 2026 The texvib Authors.
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

#include "texvib/encoder/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "texvib/error.hpp"
#include "texvib/util/binary_io.hpp"

namespace texvib::encoder {

namespace {

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

TextureImage decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorCode::kFormat, std::string("bad PNG: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width == 0 || image.height == 0 || image.width > 16384 || image.height > 16384) {
    png_image_free(&image);
    fail(ErrorCode::kFormat, "PNG dimensions out of range");
  }
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    fail(ErrorCode::kFormat, std::string("bad PNG: ") + image.message);
  }
  TextureImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  for (std::size_t i = 0; i < rgb.size(); ++i) out.pixels[i] = rgb[i] / 255.0f;
  return out;
}

TextureImage decode_bmp(const std::vector<std::uint8_t>& bytes) {
  util::ByteReader in(bytes, "BMP");
  in.skip(10);
  const std::uint32_t data_offset = in.u32();
  const std::uint32_t header_size = in.u32();
  if (header_size < 40) fail(ErrorCode::kFormat, "unsupported BMP header (size " + std::to_string(header_size) + ")");
  const auto width = static_cast<std::int32_t>(in.u32());
  const auto raw_height = static_cast<std::int32_t>(in.u32());
  in.u16();  // planes
  const std::uint16_t bpp = in.u16();
  const std::uint32_t compression = in.u32();
  in.skip(12);  // image size, resolution
  const std::uint32_t colors_used = in.u32();
  if (compression != 0) fail(ErrorCode::kFormat, "compressed BMP is not supported");
  if (bpp != 8 && bpp != 24 && bpp != 32) {
    fail(ErrorCode::kFormat, "unsupported BMP bit depth " + std::to_string(bpp));
  }
  const bool bottom_up = raw_height > 0;
  const std::int64_t height = bottom_up ? raw_height : -static_cast<std::int64_t>(raw_height);
  if (width <= 0 || height <= 0 || width > 16384 || height > 16384) {
    fail(ErrorCode::kFormat, "BMP dimensions out of range");
  }

  std::vector<std::array<float, 3>> palette;
  if (bpp == 8) {
    const std::uint32_t count = colors_used == 0 ? 256 : colors_used;
    if (count > 256) fail(ErrorCode::kFormat, "BMP palette too large");
    util::ByteReader pal(bytes, "BMP palette");
    pal.skip(14 + header_size);
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto entry = pal.bytes(4);  // B G R reserved
      palette.push_back({entry[2] / 255.0f, entry[1] / 255.0f, entry[0] / 255.0f});
    }
  }

  const std::size_t row_bytes = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
  if (data_offset > bytes.size() || bytes.size() - data_offset < row_bytes * height) {
    fail(ErrorCode::kFormat, "truncated BMP pixel data");
  }
  TextureImage out(width, static_cast<int>(height));
  for (std::int64_t row = 0; row < height; ++row) {
    const std::uint8_t* src = bytes.data() + data_offset + row * row_bytes;
    const int y = static_cast<int>(bottom_up ? height - 1 - row : row);
    for (int x = 0; x < width; ++x) {
      if (bpp == 8) {
        const std::uint8_t idx = src[x];
        if (idx >= palette.size()) fail(ErrorCode::kFormat, "BMP palette index out of range");
        for (int c = 0; c < 3; ++c) out.at(y, x, c) = palette[idx][static_cast<std::size_t>(c)];
      } else {
        const std::uint8_t* px = src + x * (bpp / 8);
        out.at(y, x, 0) = px[2] / 255.0f;
        out.at(y, x, 1) = px[1] / 255.0f;
        out.at(y, x, 2) = px[0] / 255.0f;
      }
    }
  }
  return out;
}

}  // namespace

TextureImage decode_image(const std::vector<std::uint8_t>& bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 8 && std::equal(kPng, kPng + 4, bytes.begin())) return decode_png(bytes);
  if (bytes.size() >= 54 && bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(bytes);
  fail(ErrorCode::kFormat, "unrecognized image format (expected PNG or BMP)");
}

TextureImage read_image(const std::filesystem::path& path) {
  try {
    return decode_image(util::read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) fail(ErrorCode::kFormat, path.string() + ": " + e.what());
    throw;
  }
}

std::vector<std::uint8_t> encode_png(const TextureImage& img) {
  img.validate();
  std::vector<std::uint8_t> rgb(img.pixels.size());
  for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = to_byte(img.pixels[i]);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, rgb.data(), 0, nullptr)) {
    fail(ErrorCode::kInternal, std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, rgb.data(), 0, nullptr)) {
    fail(ErrorCode::kInternal, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_png(const TextureImage& img, const std::filesystem::path& path) {
  util::write_file(path, encode_png(img));
}

void quantize_8bit(TextureImage& img) {
  for (auto& v : img.pixels) v = to_byte(v) / 255.0f;
}

}  // namespace texvib::encoder
