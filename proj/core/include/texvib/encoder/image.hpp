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
#include <vector>

#include "texvib/nn/tensor.hpp"

namespace texvib::encoder {

/// RGB image, interleaved rows (y, x, channel), values in [0, 1].
struct TextureImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  TextureImage() = default;
  TextureImage(int w, int h, float fill = 0.0f);

  float& at(int y, int x, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  float at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }

  /// Throws kFormat unless dimensions are positive, the buffer length
  /// matches and every value lies in [0, 1].
  void validate() const;
  bool operator==(const TextureImage&) const = default;
};

/// Bilinear sample with edge clamping at fractional pixel coordinates.
float sample_bilinear(const TextureImage& img, double y, double x, int c);

/// Scales by the smallest factor >= 1 that makes both sides >= size, then
/// takes the centered size x size window.
TextureImage center_crop(const TextureImage& img, int size);

/// Packs images into an (N, 3, H, W) tensor.
nn::Tensor<float> to_tensor(const std::vector<const TextureImage*>& images);

}  // namespace texvib::encoder
