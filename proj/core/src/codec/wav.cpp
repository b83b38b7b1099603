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

#include "texvib/codec/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "texvib/error.hpp"
#include "texvib/util/binary_io.hpp"

namespace texvib::codec {

namespace {

constexpr double kFullScale = 32767.0;

void append_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

void to_json(nlohmann::json& j, const WavSidecar& meta) {
  j = nlohmann::json{{"sample_rate_hz", meta.sample_rate_hz},
                     {"frames", meta.frames},
                     {"scale_factor", meta.scale_factor}};
  if (meta.norm_stats) j["norm_stats"] = *meta.norm_stats;
  if (meta.codec) j["codec"] = *meta.codec;
}

void from_json(const nlohmann::json& j, WavSidecar& meta) {
  meta.sample_rate_hz = j.at("sample_rate_hz").get<int>();
  meta.frames = j.value("frames", std::size_t{0});
  meta.scale_factor = j.at("scale_factor").get<double>();
  if (j.contains("norm_stats")) meta.norm_stats = j.at("norm_stats").get<NormStats>();
  if (j.contains("codec")) meta.codec = j.at("codec").get<CodecConfig>();
}

EncodedWav encode_wav(const Waveform& wave) {
  wave.validate();
  double peak = 0.0;
  for (double v : wave.samples) peak = std::max(peak, std::abs(v));

  EncodedWav out;
  out.scale_factor = peak / kFullScale;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  auto& b = out.bytes;
  b.reserve(44 + data_bytes);
  append_tag(b, "RIFF");
  util::put_u32(b, 36 + data_bytes);
  append_tag(b, "WAVE");
  append_tag(b, "fmt ");
  util::put_u32(b, 16);
  util::put_u16(b, 1);  // PCM
  util::put_u16(b, 1);  // mono
  util::put_u32(b, static_cast<std::uint32_t>(wave.sample_rate_hz));
  util::put_u32(b, static_cast<std::uint32_t>(wave.sample_rate_hz) * 2);
  util::put_u16(b, 2);
  util::put_u16(b, 16);
  append_tag(b, "data");
  util::put_u32(b, data_bytes);
  for (double v : wave.samples) {
    const double code = peak > 0.0 ? std::round(v / peak * kFullScale) : 0.0;
    const auto q = static_cast<std::int16_t>(std::clamp(code, -kFullScale, kFullScale));
    util::put_u16(b, static_cast<std::uint16_t>(q));
  }
  return out;
}

Waveform decode_wav(std::span<const std::uint8_t> bytes, double scale_factor) {
  util::ByteReader r(bytes, "WAV");
  if (r.tag() != "RIFF") fail(ErrorCode::kFormat, "WAV: missing RIFF header");
  r.u32();
  if (r.tag() != "WAVE") fail(ErrorCode::kFormat, "WAV: missing WAVE identifier");

  bool have_fmt = false;
  int rate = 0;
  while (r.remaining() >= 8) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) fail(ErrorCode::kFormat, "WAV: fmt chunk too short");
      const std::uint16_t format = r.u16();
      const std::uint16_t channels = r.u16();
      rate = static_cast<int>(r.u32());
      r.u32();
      r.u16();
      const std::uint16_t bits = r.u16();
      r.skip(size - 16);
      if (format != 1 || bits != 16) {
        fail(ErrorCode::kFormat, "WAV: unsupported encoding (format " + std::to_string(format) +
                                     ", " + std::to_string(bits) + " bits); expected 16-bit PCM");
      }
      if (channels != 1) {
        fail(ErrorCode::kFormat,
             "WAV: unsupported channel count " + std::to_string(channels) + "; expected mono");
      }
      if (rate <= 0) fail(ErrorCode::kFormat, "WAV: invalid sample rate");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(ErrorCode::kFormat, "WAV: data chunk precedes fmt chunk");
      if (size % 2 != 0 || size > r.remaining()) {
        fail(ErrorCode::kFormat, "WAV: truncated data chunk");
      }
      Waveform wave;
      wave.sample_rate_hz = rate;
      wave.samples.resize(size / 2);
      for (double& v : wave.samples) {
        v = static_cast<std::int16_t>(r.u16()) * scale_factor;
      }
      return wave;
    } else {
      r.skip(size + (size & 1u));
    }
  }
  fail(ErrorCode::kFormat, "WAV: no data chunk");
}

std::filesystem::path wav_sidecar_path(const std::filesystem::path& wav) {
  return std::filesystem::path(wav.string() + ".json");
}

void write_wav(const Waveform& wave, const std::filesystem::path& path,
               const std::optional<NormStats>& stats, const std::optional<CodecConfig>& codec) {
  const EncodedWav encoded = encode_wav(wave);
  util::write_file(path, encoded.bytes);
  WavSidecar meta;
  meta.sample_rate_hz = wave.sample_rate_hz;
  meta.frames = wave.samples.size();
  meta.scale_factor = encoded.scale_factor;
  meta.norm_stats = stats;
  meta.codec = codec;
  util::write_text_file(wav_sidecar_path(path), nlohmann::json(meta).dump(2) + "\n");
}

Waveform read_wav(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = util::read_file(path);
  double scale = 1.0 / kFullScale;
  const auto sidecar = wav_sidecar_path(path);
  if (std::filesystem::exists(sidecar)) {
    WavSidecar meta;
    try {
      meta = nlohmann::json::parse(util::read_text_file(sidecar)).get<WavSidecar>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kFormat, "WAV sidecar " + sidecar.string() + ": " + e.what());
    }
    scale = meta.scale_factor;
  }
  try {
    return decode_wav(bytes, scale);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace texvib::codec
