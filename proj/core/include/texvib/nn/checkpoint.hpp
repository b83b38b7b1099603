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

// TNN1 network container:
//   "TNN1" | u32 header_len | header JSON | f32 LE parameter blobs
// The header lists each network's layer specs and parameter names/shapes in
// blob order, plus free-form metadata.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "texvib/nn/layers.hpp"

namespace texvib::nn {

struct NamedNetwork {
  std::string name;
  Sequential<float>* network;
};

struct LoadedNetworks {
  nlohmann::json meta;
  std::vector<std::pair<std::string, std::unique_ptr<Sequential<float>>>> networks;

  /// Throws kFormat if no network has this name.
  std::unique_ptr<Sequential<float>> take(const std::string& name);
};

std::vector<std::uint8_t> encode_networks(const std::vector<NamedNetwork>& networks,
                                          const nlohmann::json& meta);
LoadedNetworks decode_networks(const std::vector<std::uint8_t>& bytes);

void save_networks(const std::filesystem::path& path, const std::vector<NamedNetwork>& networks,
                   const nlohmann::json& meta);
LoadedNetworks load_networks(const std::filesystem::path& path);

}  // namespace texvib::nn
