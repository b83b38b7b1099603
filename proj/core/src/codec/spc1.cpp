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

#include "texvib/codec/spc1.hpp"

#include <string>

#include "texvib/error.hpp"
#include "texvib/util/binary_io.hpp"

namespace texvib::codec {

namespace {
constexpr char kMagic[] = "SPC1";
constexpr std::uint32_t kMaxExtent = 1u << 16;
}  // namespace

std::vector<std::uint8_t> encode_spc1(const ModelSpectrogram& m) {
  std::vector<std::uint8_t> out;
  const auto rows = static_cast<std::uint32_t>(m.data.rows());
  const auto cols = static_cast<std::uint32_t>(m.data.cols());
  const std::string meta =
      nlohmann::json{{"norm_stats", m.stats}, {"codec", m.config}}.dump();
  out.reserve(12 + static_cast<std::size_t>(rows) * cols * 4 + 4 + meta.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  util::put_u32(out, rows);
  util::put_u32(out, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) util::put_f32(out, m.data(r, c));
  }
  util::put_u32(out, static_cast<std::uint32_t>(meta.size()));
  util::put_string(out, meta);
  return out;
}

ModelSpectrogram decode_spc1(std::span<const std::uint8_t> bytes) {
  util::ByteReader r(bytes, "SPC1 file");
  if (bytes.size() < 4 || r.tag() != kMagic) fail(ErrorCode::kFormat, "not an SPC1 file");
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  if (rows == 0 || cols == 0 || rows > kMaxExtent || cols > kMaxExtent) {
    fail(ErrorCode::kFormat, "SPC1 dimension overflow: " + std::to_string(rows) + "x" +
                                 std::to_string(cols));
  }
  const std::uint64_t payload = static_cast<std::uint64_t>(rows) * cols * 4;
  if (payload > r.remaining()) fail(ErrorCode::kFormat, "truncated SPC1 payload");

  ModelSpectrogram m;
  m.data.resize(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) m.data(i, j) = r.f32();
  }
  const std::uint32_t meta_len = r.u32();
  const std::string meta = r.string(meta_len);
  try {
    const auto j = nlohmann::json::parse(meta);
    m.stats = j.at("norm_stats").get<NormStats>();
    m.config = j.at("codec").get<CodecConfig>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("SPC1 metadata: ") + e.what());
  }
  return m;
}

void write_spec(const ModelSpectrogram& m, const std::filesystem::path& path) {
  util::write_file(path, encode_spc1(m));
}

ModelSpectrogram read_spec(const std::filesystem::path& path) {
  const auto bytes = util::read_file(path);
  try {
    return decode_spc1(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace texvib::codec
