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
#include <memory>
#include <string>
#include <vector>

#include "texvib/codec/types.hpp"
#include "texvib/gan/networks.hpp"

namespace texvib::gan {

/// Trained (or freshly initialized) generator/discriminator pair plus what
/// is needed to turn samples back into signals.
struct GanCheckpoint {
  GeneratorConfig generator_config;
  DiscriminatorConfig discriminator_config;
  std::unique_ptr<nn::Sequential<float>> generator;
  Discriminator<float> discriminator;
  std::vector<std::string> class_names;
  codec::NormStats stats;
  codec::CodecConfig codec;
  std::int64_t step = 0;

  int label_dim() const { return generator_config.label_dim; }
  int noise_dim() const { return generator_config.noise_dim; }
};

/// Builds both networks and initializes them from `seed`.
GanCheckpoint init_gan(const GeneratorConfig& gen, const DiscriminatorConfig& disc,
                       std::vector<std::string> class_names, const codec::NormStats& stats,
                       const codec::CodecConfig& codec, std::uint64_t seed);

std::vector<std::uint8_t> encode_gan(GanCheckpoint& ckpt);
GanCheckpoint decode_gan(const std::vector<std::uint8_t>& bytes);
void save_gan(GanCheckpoint& ckpt, const std::filesystem::path& path);
GanCheckpoint load_gan(const std::filesystem::path& path);

/// n samples G(z_i, c) with z drawn from `seed`; the discriminator is unused.
std::vector<codec::ModelSpectrogram> sample(const GanCheckpoint& ckpt,
                                            const std::vector<double>& label, std::uint64_t seed,
                                            int n);

/// (N, 1, H, W) batch -> model spectrograms carrying the checkpoint's stats.
std::vector<codec::ModelSpectrogram> to_spectrograms(const nn::Tensor<float>& batch,
                                                     const GanCheckpoint& ckpt);

}  // namespace texvib::gan
