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

#include "texvib/dataset/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>

#include "texvib/codec/fft.hpp"
#include "texvib/codec/stft.hpp"
#include "texvib/encoder/image_io.hpp"
#include "texvib/error.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::dataset {

namespace {

constexpr std::array<std::string_view, 9> kStandardNames{
    "Squared Aluminum Mesh", "Stone Tile", "Glass",        "Bamboo",    "Rubber",
    "Carpet",                "Fine Foam",  "Aluminum Foil", "Card board",
};
constexpr std::array<double, 3> kStandardPeriods{8.0, 14.0, 24.0};
constexpr double kMinSeparationBins = 3.0;

constexpr std::array<std::pair<Pattern, std::string_view>, 3> kPatternNames{{
    {Pattern::kStripes, "stripes"},
    {Pattern::kDots, "dots"},
    {Pattern::kChecker, "checker"},
}};

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, "synthetic spec: " + what);
}

}  // namespace

std::string_view to_string(Pattern p) {
  for (const auto& [k, name] : kPatternNames) {
    if (k == p) return name;
  }
  return "unknown";
}

Pattern pattern_from_string(std::string_view name) {
  for (const auto& [k, n] : kPatternNames) {
    if (n == name) return k;
  }
  fail(ErrorCode::kFormat, "unknown pattern '" + std::string(name) + "'");
}

SyntheticSpec SyntheticSpec::standard(int num_classes) {
  if (num_classes < 2 || num_classes > static_cast<int>(kStandardNames.size())) {
    fail(ErrorCode::kInvalidArgument, "standard synthetic spec supports 2.." +
                                          std::to_string(kStandardNames.size()) +
                                          " classes, got " + std::to_string(num_classes));
  }
  SyntheticSpec spec;
  for (int k = 0; k < num_classes; ++k) {
    ClassSignature c;
    c.name = std::string(kStandardNames[k]);
    c.center_hz = 200.0 + 250.0 * k;
    c.bandwidth_hz = 30.0;
    c.am_rate_hz = 2.0 + 1.5 * k;
    c.pattern = static_cast<Pattern>(k % 3);
    c.period_px = kStandardPeriods[(k / 3) % 3];
    c.orientation_deg = 20.0 * k;
    spec.classes.push_back(c);
  }
  return spec;
}

void SyntheticSpec::validate() const {
  codec.validate();
  require(!classes.empty(), "no classes");
  require(samples_per_class >= 1, "samples_per_class must be positive");
  require(codec::frame_count(static_cast<std::size_t>(std::max(signal_length, 0)), codec) >=
              codec.model_time_frames,
          "signal_length " + std::to_string(signal_length) + " is shorter than the " +
              std::to_string(codec.model_time_frames) + "-frame model crop");
  require(noise_floor >= 0.0 && std::isfinite(noise_floor), "noise_floor must be >= 0");
  require(am_depth >= 0.0 && am_depth < 1.0, "am_depth must be in [0, 1)");
  require(image_width >= 16 && image_height >= 16, "images must be at least 16x16");

  const double top_hz = (codec.crop_bins() - 1) * codec.bin_hz();
  const double nyquist = codec.sample_rate_hz / 2.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    const std::string tag = "class '" + c.name + "'";
    require(!c.name.empty(), "class " + std::to_string(i) + " has an empty name");
    require(c.bandwidth_hz > 0.0, tag + ": bandwidth must be positive");
    require(c.center_hz - c.bandwidth_hz / 2 > 0.0, tag + ": band reaches below 0 Hz");
    require(c.center_hz + c.bandwidth_hz / 2 < std::min(top_hz, nyquist),
            tag + ": band edge " + std::to_string(c.center_hz + c.bandwidth_hz / 2) +
                " Hz is above the model crop limit " + std::to_string(top_hz) + " Hz");
    require(c.am_rate_hz > 0.0 && c.am_rate_hz < nyquist, tag + ": am_rate_hz out of range");
    require(c.period_px >= 2.0, tag + ": period_px must be >= 2");
    require(std::isfinite(c.orientation_deg), tag + ": orientation must be finite");
    for (std::size_t j = 0; j < i; ++j) {
      require(classes[j].name != c.name, "duplicate class name '" + c.name + "'");
      const double sep = std::abs(classes[j].center_hz - c.center_hz) / codec.bin_hz();
      require(sep >= kMinSeparationBins,
              "signature collision: '" + classes[j].name + "' and '" + c.name + "' are " +
                  std::to_string(sep) + " STFT bins apart (minimum 3)");
    }
  }
}

void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  auto cls = nlohmann::json::array();
  for (const auto& c : s.classes) {
    cls.push_back({{"name", c.name},
                   {"center_hz", c.center_hz},
                   {"bandwidth_hz", c.bandwidth_hz},
                   {"am_rate_hz", c.am_rate_hz},
                   {"pattern", to_string(c.pattern)},
                   {"period_px", c.period_px},
                   {"orientation_deg", c.orientation_deg}});
  }
  j = nlohmann::json{{"classes", cls},
                     {"samples_per_class", s.samples_per_class},
                     {"signal_length", s.signal_length},
                     {"noise_floor", s.noise_floor},
                     {"am_depth", s.am_depth},
                     {"image_width", s.image_width},
                     {"image_height", s.image_height},
                     {"codec", s.codec}};
}

void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  SyntheticSpec out;
  for (const auto& c : j.at("classes")) {
    ClassSignature sig;
    sig.name = c.at("name").get<std::string>();
    sig.center_hz = c.at("center_hz").get<double>();
    sig.bandwidth_hz = c.value("bandwidth_hz", sig.bandwidth_hz);
    sig.am_rate_hz = c.value("am_rate_hz", sig.am_rate_hz);
    sig.pattern = pattern_from_string(c.value("pattern", std::string("stripes")));
    sig.period_px = c.value("period_px", sig.period_px);
    sig.orientation_deg = c.value("orientation_deg", sig.orientation_deg);
    out.classes.push_back(sig);
  }
  out.samples_per_class = j.value("samples_per_class", out.samples_per_class);
  out.signal_length = j.value("signal_length", out.signal_length);
  out.noise_floor = j.value("noise_floor", out.noise_floor);
  out.am_depth = j.value("am_depth", out.am_depth);
  out.image_width = j.value("image_width", out.image_width);
  out.image_height = j.value("image_height", out.image_height);
  if (j.contains("codec")) out.codec = j.at("codec").get<codec::CodecConfig>();
  s = out;
}

codec::Waveform synthesize_signal(const SyntheticSpec& spec, int class_index, std::uint64_t seed) {
  const auto& sig = spec.classes.at(class_index);
  const int n = spec.signal_length;
  const double fs = spec.codec.sample_rate_hz;
  util::Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Band-limited noise: zero every DFT bin outside the band.
  std::vector<double> white(n);
  for (auto& v : white) v = normal(rng);
  codec::RealFft fft(n);
  std::vector<std::complex<double>> bins(fft.num_bins());
  fft.forward(white, bins);
  const double df = fs / n;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (std::abs(k * df - sig.center_hz) > sig.bandwidth_hz / 2) bins[k] = 0.0;
  }
  std::vector<double> band(n);
  fft.inverse(bins, band);
  double power = 0.0;
  for (double v : band) power += v * v;
  const double rms = std::sqrt(power / n);
  if (!(rms > 0.0)) fail(ErrorCode::kInternal, "synthesize_signal: empty band");

  const double gain = (0.8 + 0.4 * unit(rng)) / rms;
  const double phase = 2 * std::numbers::pi * unit(rng);
  const double w = 2 * std::numbers::pi * sig.am_rate_hz / fs;
  codec::Waveform wave;
  wave.sample_rate_hz = spec.codec.sample_rate_hz;
  wave.samples.resize(n);
  for (int t = 0; t < n; ++t) {
    const double env = 1.0 + spec.am_depth * std::sin(w * t + phase);
    // Rounded to float so that the f32 files on disk hold exactly this signal.
    wave.samples[t] = static_cast<float>(gain * env * band[t] + spec.noise_floor * normal(rng));
  }
  return wave;
}

encoder::TextureImage synthesize_image(const SyntheticSpec& spec, int class_index,
                                       std::uint64_t seed) {
  const auto& sig = spec.classes.at(class_index);
  util::Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double two_pi = 2 * std::numbers::pi;
  const double theta = (sig.orientation_deg + 20.0 * (unit(rng) - 0.5)) * std::numbers::pi / 180;
  const double period = sig.period_px * (0.95 + 0.1 * unit(rng));
  const double phase_u = two_pi * unit(rng);
  const double phase_v = two_pi * unit(rng);
  const double brightness = 0.35 + 0.3 * unit(rng);
  const double contrast = 0.55 + 0.35 * unit(rng);
  std::array<double, 3> tint{};
  for (auto& t : tint) t = 0.9 + 0.2 * unit(rng);

  const double ct = std::cos(theta), st = std::sin(theta);
  const double k = two_pi / period;
  encoder::TextureImage img(spec.image_width, spec.image_height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double u = k * (x * ct + y * st) + phase_u;
      const double v = k * (-x * st + y * ct) + phase_v;
      double p = 0.0;  // pattern value in [-1, 1]
      switch (sig.pattern) {
        case Pattern::kStripes:
          p = std::sin(u);
          break;
        case Pattern::kDots:
          p = std::tanh(4.0 * (std::cos(u) + std::cos(v) - 1.0));
          break;
        case Pattern::kChecker:
          p = std::tanh(4.0 * std::sin(u) * std::sin(v));
          break;
      }
      const double noise = 0.02 * normal(rng);
      for (int c = 0; c < 3; ++c) {
        const double val = (brightness + 0.5 * contrast * p) * tint[c] + noise;
        img.at(y, x, c) = static_cast<float>(std::clamp(val, 0.0, 1.0));
      }
    }
  }
  encoder::quantize_8bit(img);
  return img;
}

Dataset synthesize_dataset(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Dataset data;
  data.codec = spec.codec;
  for (const auto& c : spec.classes) data.class_names.push_back(c.name);
  data.samples.reserve(spec.classes.size() * spec.samples_per_class);
  for (std::size_t k = 0; k < spec.classes.size(); ++k) {
    for (int i = 0; i < spec.samples_per_class; ++i) {
      const auto base = util::derive_seed(seed, {k, static_cast<std::uint64_t>(i)});
      SamplePair s;
      s.class_index = static_cast<int>(k);
      s.class_name = spec.classes[k].name;
      char id[16];
      std::snprintf(id, sizeof(id), "s%04d", i);
      s.id = id;
      s.wave = synthesize_signal(spec, s.class_index, util::derive_seed(base, {1}));
      s.image = std::make_shared<const encoder::TextureImage>(
          synthesize_image(spec, s.class_index, util::derive_seed(base, {2})));
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

}  // namespace texvib::dataset
