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

#include "texvib/encoder/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "texvib/error.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::encoder {

namespace {

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

// Mirror a coordinate into [0, n - 1] (reflect without repeating the edge).
double reflect(double v, int n) {
  if (n == 1) return 0.0;
  const double period = 2.0 * (n - 1);
  v = std::fmod(std::abs(v), period);
  return v > n - 1 ? period - v : v;
}

}  // namespace

void AugmentConfig::validate() const {
  if (!(scale_min >= 1.0 && scale_max >= scale_min)) {
    fail(ErrorCode::kInvalidArgument, "augment scale range must satisfy 1 <= min <= max");
  }
  if (crop < 1) fail(ErrorCode::kInvalidArgument, "augment crop must be positive");
  if (!is_prob(hflip_prob) || !is_prob(vflip_prob) || !is_prob(erase_prob)) {
    fail(ErrorCode::kInvalidArgument, "augment probabilities must be in [0, 1]");
  }
  if (!(rotation_deg >= 0 && rotation_deg <= 180)) {
    fail(ErrorCode::kInvalidArgument, "augment rotation must be in [0, 180] degrees");
  }
  if (!(erase_area_min > 0 && erase_area_max >= erase_area_min && erase_area_max < 1)) {
    fail(ErrorCode::kInvalidArgument, "augment erase area must satisfy 0 < min <= max < 1");
  }
  if (!(mixup_alpha >= 0)) fail(ErrorCode::kInvalidArgument, "mixup alpha must be >= 0");
}

void to_json(nlohmann::json& j, const AugmentConfig& c) {
  j = {{"scale_min", c.scale_min},       {"scale_max", c.scale_max},
       {"crop", c.crop},                 {"random_crop", c.random_crop},
       {"hflip_prob", c.hflip_prob},     {"vflip_prob", c.vflip_prob},
       {"rotation_deg", c.rotation_deg}, {"erase_prob", c.erase_prob},
       {"erase_area_min", c.erase_area_min}, {"erase_area_max", c.erase_area_max},
       {"mixup_alpha", c.mixup_alpha}};
}

void from_json(const nlohmann::json& j, AugmentConfig& c) {
  AugmentConfig o;
  o.scale_min = j.value("scale_min", o.scale_min);
  o.scale_max = j.value("scale_max", o.scale_max);
  o.crop = j.value("crop", o.crop);
  o.random_crop = j.value("random_crop", o.random_crop);
  o.hflip_prob = j.value("hflip_prob", o.hflip_prob);
  o.vflip_prob = j.value("vflip_prob", o.vflip_prob);
  o.rotation_deg = j.value("rotation_deg", o.rotation_deg);
  o.erase_prob = j.value("erase_prob", o.erase_prob);
  o.erase_area_min = j.value("erase_area_min", o.erase_area_min);
  o.erase_area_max = j.value("erase_area_max", o.erase_area_max);
  o.mixup_alpha = j.value("mixup_alpha", o.mixup_alpha);
  o.validate();
  c = o;
}

TextureImage augment(const TextureImage& img, const AugmentConfig& config, std::uint64_t seed) {
  config.validate();
  const int crop = config.crop;
  util::Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double scale = config.scale_min + (config.scale_max - config.scale_min) * unit(rng);
  const double scaled_h = img.height * scale, scaled_w = img.width * scale;
  if (scaled_h < crop || scaled_w < crop) {
    fail(ErrorCode::kInvalidArgument, "image " + std::to_string(img.width) + "x" +
                                          std::to_string(img.height) + " is smaller than the " +
                                          std::to_string(crop) + " crop");
  }
  double oy = (scaled_h - crop) / 2.0, ox = (scaled_w - crop) / 2.0;
  if (config.random_crop) {
    oy = std::floor(unit(rng) * (std::floor(scaled_h) - crop + 1));
    ox = std::floor(unit(rng) * (std::floor(scaled_w) - crop + 1));
  }
  const bool hflip = unit(rng) < config.hflip_prob;
  const bool vflip = unit(rng) < config.vflip_prob;
  const double angle = config.rotation_deg > 0
                           ? (2.0 * unit(rng) - 1.0) * config.rotation_deg * std::numbers::pi / 180.0
                           : 0.0;

  // Scale + crop + flips, sampled straight from the source image.
  TextureImage base(crop, crop);
  const bool identity = scale == 1.0 && oy == std::floor(oy) && ox == std::floor(ox);
  for (int y = 0; y < crop; ++y) {
    const int sy = vflip ? crop - 1 - y : y;
    for (int x = 0; x < crop; ++x) {
      const int sx = hflip ? crop - 1 - x : x;
      for (int c = 0; c < 3; ++c) {
        base.at(y, x, c) =
            identity ? img.at(sy + static_cast<int>(oy), sx + static_cast<int>(ox), c)
                     : sample_bilinear(img, (oy + sy + 0.5) / scale - 0.5,
                                       (ox + sx + 0.5) / scale - 0.5, c);
      }
    }
  }

  TextureImage out = base;
  if (angle != 0.0) {
    const double cy = (crop - 1) / 2.0, cx = (crop - 1) / 2.0;
    const double cs = std::cos(angle), sn = std::sin(angle);
    for (int y = 0; y < crop; ++y) {
      for (int x = 0; x < crop; ++x) {
        const double dy = y - cy, dx = x - cx;
        const double sy = reflect(cy + cs * dy - sn * dx, crop);
        const double sx = reflect(cx + sn * dy + cs * dx, crop);
        for (int c = 0; c < 3; ++c) out.at(y, x, c) = sample_bilinear(base, sy, sx, c);
      }
    }
  }

  if (unit(rng) < config.erase_prob) {
    const double area = crop * crop * (config.erase_area_min +
                                       (config.erase_area_max - config.erase_area_min) * unit(rng));
    const double log_ratio = std::log(0.3) + (std::log(1.0 / 0.3) - std::log(0.3)) * unit(rng);
    const double ratio = std::exp(log_ratio);
    const int eh = std::clamp(static_cast<int>(std::lround(std::sqrt(area * ratio))), 1, crop);
    const int ew = std::clamp(static_cast<int>(std::lround(std::sqrt(area / ratio))), 1, crop);
    const int y0 = static_cast<int>(unit(rng) * (crop - eh + 1));
    const int x0 = static_cast<int>(unit(rng) * (crop - ew + 1));
    for (int y = y0; y < y0 + eh; ++y) {
      for (int x = x0; x < x0 + ew; ++x) {
        for (int c = 0; c < 3; ++c) out.at(y, x, c) = static_cast<float>(unit(rng));
      }
    }
  }
  for (auto& v : out.pixels) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

void mixup(const TextureImage& a, const std::vector<float>& label_a, const TextureImage& b,
           const std::vector<float>& label_b, double lambda, TextureImage& out_image,
           std::vector<float>& out_label) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kInvalidArgument, "mixup lambda must be in [0, 1]");
  if (a.width != b.width || a.height != b.height || label_a.size() != label_b.size()) {
    fail(ErrorCode::kDimension, "mixup operands differ in shape");
  }
  // The larger weight is taken as given and the smaller one derived from it;
  // 1 - w is exact for w in [0.5, 1], which makes the operation symmetric.
  double wa, wb;
  if (lambda >= 0.5) {
    wa = lambda;
    wb = 1.0 - wa;
  } else {
    wb = 1.0 - lambda;
    wa = 1.0 - wb;
  }
  out_image = TextureImage(a.width, a.height);
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    out_image.pixels[i] = static_cast<float>(wa * a.pixels[i] + wb * b.pixels[i]);
  }
  out_label.resize(label_a.size());
  for (std::size_t i = 0; i < label_a.size(); ++i) {
    out_label[i] = static_cast<float>(wa * label_a[i] + wb * label_b[i]);
  }
}

double sample_mixup_lambda(double alpha, std::uint64_t seed) {
  if (!(alpha > 0)) fail(ErrorCode::kInvalidArgument, "mixup alpha must be positive");
  util::Rng rng(seed);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  const double x = gamma(rng), y = gamma(rng);
  return x + y > 0 ? x / (x + y) : 0.5;
}

}  // namespace texvib::encoder
