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

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "texvib/encoder/image.hpp"

namespace texvib::encoder {

/// Decodes PNG (any bit depth/color type, converted to 8-bit RGB) or
/// uncompressed BMP (8-bit palettized, 24-bit, 32-bit), detected by magic.
TextureImage decode_image(const std::vector<std::uint8_t>& bytes);
TextureImage read_image(const std::filesystem::path& path);

/// 8-bit RGB PNG; values are rounded to the nearest 1/255.
std::vector<std::uint8_t> encode_png(const TextureImage& img);
void write_png(const TextureImage& img, const std::filesystem::path& path);

/// Rounds every value to the nearest multiple of 1/255, i.e. what a PNG
/// round trip yields.
void quantize_8bit(TextureImage& img);

}  // namespace texvib::encoder
