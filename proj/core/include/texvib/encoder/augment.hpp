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
#include <nlohmann/json.hpp>
#include <vector>

#include "texvib/encoder/image.hpp"

namespace texvib::encoder {

struct AugmentConfig {
  double scale_min = 1.0;
  double scale_max = 1.3;
  int crop = 128;
  bool random_crop = true;  // false: centered window
  double hflip_prob = 0.5;
  double vflip_prob = 0.5;
  double rotation_deg = 180.0;  // angle drawn uniformly from [-r, r]
  double erase_prob = 0.5;
  double erase_area_min = 0.02;
  double erase_area_max = 0.33;
  double mixup_alpha = 0.2;  // 0 disables mixup

  void validate() const;
};

void to_json(nlohmann::json& j, const AugmentConfig& c);
void from_json(const nlohmann::json& j, AugmentConfig& c);

/// Scale, crop, flips, rotation (reflect padding), random erasing; fully
/// determined by `seed`.
TextureImage augment(const TextureImage& img, const AugmentConfig& config, std::uint64_t seed);

/// lambda * a + (1 - lambda) * b for pixels and labels. Symmetric:
/// mixup(a, b, l) == mixup(b, a, 1 - l) bit for bit.
void mixup(const TextureImage& a, const std::vector<float>& label_a, const TextureImage& b,
           const std::vector<float>& label_b, double lambda, TextureImage& out_image,
           std::vector<float>& out_label);

/// Beta(alpha, alpha) draw via two gamma variates.
double sample_mixup_lambda(double alpha, std::uint64_t seed);

}  // namespace texvib::encoder
