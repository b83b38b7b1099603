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

// Fixtures shared by the unit tests.

#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "texvib/codec/types.hpp"
#include "texvib/dataset/synthetic.hpp"
#include "texvib/encoder/encoder.hpp"
#include "texvib/gan/checkpoint.hpp"
#include "texvib/nn/layers.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("texvib-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline codec::Waveform random_wave(std::size_t n, std::uint64_t seed, int rate = 10000) {
  util::Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  codec::Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(n);
  for (auto& v : w.samples) v = normal(rng);
  return w;
}

inline std::vector<std::string> standard_names() {
  std::vector<std::string> out;
  for (const auto& c : dataset::SyntheticSpec::standard().classes) out.push_back(c.name);
  return out;
}

/// Narrow networks with the production input/output geometry (128x128,
/// 9 labels) so the full pipeline runs in milliseconds.
inline gan::GeneratorConfig tiny_generator_config() {
  gan::GeneratorConfig g;
  g.noise_dim = 8;
  g.base_channels = 8;
  g.residual_blocks = 1;
  g.upsample_channels = {4, 4, 2, 2};
  return g;
}

inline gan::DiscriminatorConfig tiny_discriminator_config() {
  gan::DiscriminatorConfig d;
  d.channels = {2, 2, 4, 4, 4};
  return d;
}

inline gan::GanCheckpoint tiny_gan(std::uint64_t seed,
                                   std::vector<std::string> names = standard_names()) {
  codec::NormStats stats{-20.0, 60.0};
  return gan::init_gan(tiny_generator_config(), tiny_discriminator_config(), std::move(names),
                       stats, codec::CodecConfig{}, seed);
}

inline encoder::EncoderCheckpoint tiny_encoder(std::uint64_t seed,
                                               std::vector<std::string> names = standard_names()) {
  encoder::EncoderCheckpoint ckpt;
  ckpt.network = nn::make_sequential<float>(encoder::encoder_specs(static_cast<int>(names.size())));
  util::Rng rng(seed);
  ckpt.network->initialize(rng);
  ckpt.class_names = std::move(names);
  return ckpt;
}

/// Small synthetic spec: short signals and images, few samples per class.
inline dataset::SyntheticSpec small_spec(int per_class = 4, int classes = 9) {
  auto spec = dataset::SyntheticSpec::standard(classes);
  spec.samples_per_class = per_class;
  spec.signal_length = 20000;
  spec.image_width = 160;
  spec.image_height = 144;
  return spec;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs `command` through the shell, capturing stdout and stderr in `dir`.
inline CommandResult run_command(const std::string& command, const std::filesystem::path& dir) {
  const auto out = dir / "cmd.stdout", err = dir / "cmd.stderr";
  const int status =
      std::system((command + " >'" + out.string() + "' 2>'" + err.string() + "'").c_str());
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace texvib::testing
