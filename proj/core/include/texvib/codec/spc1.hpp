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
#include <span>
#include <vector>

#include "texvib/codec/types.hpp"

namespace texvib::codec {

/// SPC1 layout (all integers little-endian):
///
///   offset 0   "SPC1"
///   offset 4   u32 rows
///   offset 8   u32 cols
///   offset 12  rows*cols f32, row-major
///   then       u32 n, followed by n bytes of UTF-8 JSON
///              {"norm_stats": {...}, "codec": {...}}
std::vector<std::uint8_t> encode_spc1(const ModelSpectrogram& m);
ModelSpectrogram decode_spc1(std::span<const std::uint8_t> bytes);

void write_spec(const ModelSpectrogram& m, const std::filesystem::path& path);
ModelSpectrogram read_spec(const std::filesystem::path& path);

}  // namespace texvib::codec
