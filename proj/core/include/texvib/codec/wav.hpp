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
#include <optional>
#include <span>
#include <vector>

#include "texvib/codec/types.hpp"

namespace texvib::codec {

/// Contents of the `<file>.wav.json` sidecar. `scale_factor` converts a
/// PCM code back to physical units: sample = code * scale_factor.
struct WavSidecar {
  int sample_rate_hz = 0;
  std::size_t frames = 0;
  double scale_factor = 1.0 / 32767.0;
  std::optional<NormStats> norm_stats;
  std::optional<CodecConfig> codec;
};

void to_json(nlohmann::json& j, const WavSidecar& meta);
void from_json(const nlohmann::json& j, WavSidecar& meta);

/// Peak-normalized 16-bit PCM mono RIFF image of `wave`.
struct EncodedWav {
  std::vector<std::uint8_t> bytes;
  double scale_factor = 0.0;
};

EncodedWav encode_wav(const Waveform& wave);

/// Decodes a 16-bit PCM mono RIFF image; samples are code * scale_factor.
Waveform decode_wav(std::span<const std::uint8_t> bytes, double scale_factor = 1.0 / 32767.0);

std::filesystem::path wav_sidecar_path(const std::filesystem::path& wav);

/// Writes the WAV plus its JSON sidecar. Extra metadata is optional.
void write_wav(const Waveform& wave, const std::filesystem::path& path,
               const std::optional<NormStats>& stats = std::nullopt,
               const std::optional<CodecConfig>& codec = std::nullopt);

/// Reads a WAV; when a sidecar exists its scale factor restores physical units.
Waveform read_wav(const std::filesystem::path& path);

}  // namespace texvib::codec
