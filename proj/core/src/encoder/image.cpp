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

#include "texvib/encoder/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "texvib/error.hpp"

namespace texvib::encoder {

TextureImage::TextureImage(int w, int h, float fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {
  if (w < 1 || h < 1) fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
}

void TextureImage::validate() const {
  if (width < 1 || height < 1) fail(ErrorCode::kFormat, "image has empty dimensions");
  if (pixels.size() != static_cast<std::size_t>(width) * height * 3) {
    fail(ErrorCode::kFormat, "image buffer does not match " + std::to_string(width) + "x" +
                                 std::to_string(height) + "x3");
  }
  for (float v : pixels) {
    if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorCode::kFormat, "image value outside [0, 1]");
  }
}

float sample_bilinear(const TextureImage& img, double y, double x, int c) {
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  const int y0 = static_cast<int>(y), x0 = static_cast<int>(x);
  const int y1 = std::min(y0 + 1, img.height - 1), x1 = std::min(x0 + 1, img.width - 1);
  const double fy = y - y0, fx = x - x0;
  const double top = img.at(y0, x0, c) * (1 - fx) + img.at(y0, x1, c) * fx;
  const double bottom = img.at(y1, x0, c) * (1 - fx) + img.at(y1, x1, c) * fx;
  return static_cast<float>(top * (1 - fy) + bottom * fy);
}

TextureImage center_crop(const TextureImage& img, int size) {
  if (size < 1) fail(ErrorCode::kInvalidArgument, "crop size must be positive");
  img.validate();
  const double scale = std::max({1.0, static_cast<double>(size) / img.width,
                                 static_cast<double>(size) / img.height});
  const double oy = (img.height * scale - size) / 2.0;
  const double ox = (img.width * scale - size) / 2.0;
  TextureImage out(size, size);
  const bool exact = scale == 1.0 && oy == std::floor(oy) && ox == std::floor(ox);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) =
            exact ? img.at(y + static_cast<int>(oy), x + static_cast<int>(ox), c)
                  : sample_bilinear(img, (oy + y + 0.5) / scale - 0.5, (ox + x + 0.5) / scale - 0.5, c);
      }
    }
  }
  return out;
}

nn::Tensor<float> to_tensor(const std::vector<const TextureImage*>& images) {
  if (images.empty()) fail(ErrorCode::kInvalidArgument, "no images to pack");
  const int h = images.front()->height, w = images.front()->width;
  nn::Tensor<float> out({static_cast<std::int64_t>(images.size()), 3, h, w});
  for (std::size_t n = 0; n < images.size(); ++n) {
    const TextureImage& img = *images[n];
    if (img.height != h || img.width != w) fail(ErrorCode::kDimension, "images in a batch differ in size");
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          out.at(static_cast<std::int64_t>(n), c, y, x) = img.at(y, x, c);
        }
      }
    }
  }
  return out;
}

}  // namespace texvib::encoder
