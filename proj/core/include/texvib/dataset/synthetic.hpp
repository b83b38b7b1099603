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
#include <string>
#include <vector>

#include "texvib/dataset/dataset.hpp"

namespace texvib::dataset {

enum class Pattern { kStripes, kDots, kChecker };

std::string_view to_string(Pattern p);
Pattern pattern_from_string(std::string_view name);

struct ClassSignature {
  std::string name;
  double center_hz = 0.0;
  double bandwidth_hz = 30.0;
  double am_rate_hz = 2.0;
  Pattern pattern = Pattern::kStripes;
  double period_px = 12.0;
  double orientation_deg = 0.0;
};

struct SyntheticSpec {
  std::vector<ClassSignature> classes;
  int samples_per_class = 40;
  int signal_length = 40000;
  double noise_floor = 0.01;
  double am_depth = 0.5;
  int image_width = 480;
  int image_height = 320;
  codec::CodecConfig codec;

  /// Nine classes: center frequencies 200 + 250k Hz, AM rates 2 + 1.5k Hz,
  /// images cycling through the three patterns at three periods.
  static SyntheticSpec standard(int num_classes = 9);

  /// Rejects signature collisions (centers closer than three STFT bins),
  /// bands reaching past the model crop, and malformed sizes.
  void validate() const;
};

void to_json(nlohmann::json& j, const SyntheticSpec& s);
void from_json(const nlohmann::json& j, SyntheticSpec& s);

/// Deterministic in (spec, seed); samples are ordered by class then index.
Dataset synthesize_dataset(const SyntheticSpec& spec, std::uint64_t seed);

codec::Waveform synthesize_signal(const SyntheticSpec& spec, int class_index, std::uint64_t seed);
encoder::TextureImage synthesize_image(const SyntheticSpec& spec, int class_index,
                                       std::uint64_t seed);

}  // namespace texvib::dataset
