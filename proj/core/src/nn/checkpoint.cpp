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

#include "texvib/nn/checkpoint.hpp"

#include "texvib/error.hpp"
#include "texvib/util/binary_io.hpp"

namespace texvib::nn {

namespace {

constexpr char kMagic[] = "TNN1";
constexpr int kVersion = 1;

}  // namespace

std::unique_ptr<Sequential<float>> LoadedNetworks::take(const std::string& name) {
  for (auto& [n, net] : networks) {
    if (n == name && net) return std::move(net);
  }
  fail(ErrorCode::kFormat, "checkpoint has no network named '" + name + "'");
}

std::vector<std::uint8_t> encode_networks(const std::vector<NamedNetwork>& networks,
                                          const nlohmann::json& meta) {
  nlohmann::json header{{"format", kMagic}, {"version", kVersion}, {"meta", meta}};
  header["networks"] = nlohmann::json::array();
  std::vector<std::uint8_t> blobs;
  for (const auto& [name, net] : networks) {
    nlohmann::json entry{{"name", name}, {"layers", specs(*net)}};
    entry["params"] = nlohmann::json::array();
    for (const auto& p : parameters(*net)) {
      entry["params"].push_back(
          {{"name", p.name}, {"shape", p.param->value.shape()}, {"trainable", p.param->trainable}});
      for (float v : p.param->value.values()) util::put_f32(blobs, v);
    }
    header["networks"].push_back(std::move(entry));
  }
  const std::string text = header.dump();
  std::vector<std::uint8_t> out;
  out.reserve(8 + text.size() + blobs.size());
  util::put_string(out, kMagic);
  util::put_u32(out, static_cast<std::uint32_t>(text.size()));
  util::put_string(out, text);
  util::put_bytes(out, blobs);
  return out;
}

LoadedNetworks decode_networks(const std::vector<std::uint8_t>& bytes) {
  util::ByteReader in(bytes, "TNN1 payload");
  if (bytes.size() < 4 || in.tag() != kMagic) fail(ErrorCode::kFormat, "not a TNN1 checkpoint");
  const std::uint32_t header_len = in.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.string(header_len));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("bad TNN1 header: ") + e.what());
  }
  LoadedNetworks out;
  try {
    if (header.at("version").get<int>() != kVersion) {
      fail(ErrorCode::kFormat, "unsupported TNN1 version " + header.at("version").dump());
    }
    out.meta = header.value("meta", nlohmann::json::object());
    for (const auto& entry : header.at("networks")) {
      const auto name = entry.at("name").get<std::string>();
      auto net = make_sequential<float>(entry.at("layers").get<std::vector<LayerSpec>>());
      auto params = parameters(*net);
      const auto& declared = entry.at("params");
      if (declared.size() != params.size()) {
        fail(ErrorCode::kFormat, "network '" + name + "' declares " +
                                     std::to_string(declared.size()) + " parameters, layers need " +
                                     std::to_string(params.size()));
      }
      for (std::size_t i = 0; i < params.size(); ++i) {
        const auto pname = declared[i].at("name").get<std::string>();
        const auto shape = declared[i].at("shape").get<Shape>();
        if (pname != params[i].name || shape != params[i].param->value.shape()) {
          fail(ErrorCode::kFormat, "network '" + name + "' parameter " + std::to_string(i) + " is " +
                                       pname + shape_str(shape) + ", expected " + params[i].name +
                                       shape_str(params[i].param->value.shape()));
        }
        for (auto& v : params[i].param->value.values()) v = in.f32();
      }
      out.networks.emplace_back(name, std::move(net));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("bad TNN1 header: ") + e.what());
  }
  if (in.remaining() != 0) {
    fail(ErrorCode::kFormat, std::to_string(in.remaining()) + " trailing bytes after TNN1 payload");
  }
  return out;
}

void save_networks(const std::filesystem::path& path, const std::vector<NamedNetwork>& networks,
                   const nlohmann::json& meta) {
  util::write_file(path, encode_networks(networks, meta));
}

LoadedNetworks load_networks(const std::filesystem::path& path) {
  return decode_networks(util::read_file(path));
}

}  // namespace texvib::nn
