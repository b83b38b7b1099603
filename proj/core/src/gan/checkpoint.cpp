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

#include "texvib/gan/checkpoint.hpp"

#include "texvib/error.hpp"
#include "texvib/gan/label.hpp"
#include "texvib/nn/checkpoint.hpp"
#include "texvib/util/binary_io.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::gan {

GanCheckpoint init_gan(const GeneratorConfig& gen, const DiscriminatorConfig& disc,
                       std::vector<std::string> class_names, const codec::NormStats& stats,
                       const codec::CodecConfig& codec, std::uint64_t seed) {
  if (gen.label_dim != disc.label_dim) {
    fail(ErrorCode::kMismatch, "generator and discriminator label dims differ");
  }
  if (static_cast<int>(class_names.size()) != gen.label_dim) {
    fail(ErrorCode::kMismatch, std::to_string(class_names.size()) + " class names for label dim " +
                                   std::to_string(gen.label_dim));
  }
  if (gen.output_size() != disc.input_size) {
    fail(ErrorCode::kMismatch, "generator output " + std::to_string(gen.output_size()) +
                                   " does not match discriminator input " +
                                   std::to_string(disc.input_size));
  }
  stats.validate();
  codec.validate();
  GanCheckpoint ckpt;
  ckpt.generator_config = gen;
  ckpt.discriminator_config = disc;
  ckpt.generator = build_generator<float>(gen);
  ckpt.discriminator = build_discriminator<float>(disc);
  ckpt.class_names = std::move(class_names);
  ckpt.stats = stats;
  ckpt.codec = codec;
  util::Rng rng(util::derive_seed(seed, {0}));
  ckpt.generator->initialize(rng);
  ckpt.discriminator.initialize(rng);
  return ckpt;
}

std::vector<std::uint8_t> encode_gan(GanCheckpoint& ckpt) {
  const nlohmann::json meta{{"kind", "gan"},
                            {"generator", ckpt.generator_config},
                            {"discriminator", ckpt.discriminator_config},
                            {"class_names", ckpt.class_names},
                            {"norm_stats", ckpt.stats},
                            {"codec", ckpt.codec},
                            {"step", ckpt.step}};
  return nn::encode_networks({{"generator", ckpt.generator.get()},
                              {"disc_trunk", ckpt.discriminator.trunk.get()},
                              {"disc_adv", ckpt.discriminator.adv.get()},
                              {"disc_cls", ckpt.discriminator.cls.get()}},
                             meta);
}

GanCheckpoint decode_gan(const std::vector<std::uint8_t>& bytes) {
  nn::LoadedNetworks loaded = nn::decode_networks(bytes);
  GanCheckpoint ckpt;
  try {
    const auto& meta = loaded.meta;
    if (meta.value("kind", "") != "gan") fail(ErrorCode::kFormat, "checkpoint is not a GAN checkpoint");
    ckpt.generator_config = meta.at("generator").get<GeneratorConfig>();
    ckpt.discriminator_config = meta.at("discriminator").get<DiscriminatorConfig>();
    ckpt.class_names = meta.at("class_names").get<std::vector<std::string>>();
    ckpt.stats = meta.at("norm_stats").get<codec::NormStats>();
    ckpt.codec = meta.at("codec").get<codec::CodecConfig>();
    ckpt.step = meta.at("step").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("bad GAN checkpoint metadata: ") + e.what());
  }
  if (static_cast<int>(ckpt.class_names.size()) != ckpt.generator_config.label_dim) {
    fail(ErrorCode::kFormat, "GAN checkpoint class list does not match its label dimension");
  }
  ckpt.generator = loaded.take("generator");
  ckpt.discriminator.trunk = loaded.take("disc_trunk");
  ckpt.discriminator.adv = loaded.take("disc_adv");
  ckpt.discriminator.cls = loaded.take("disc_cls");
  if (nn::specs(*ckpt.generator) != generator_specs(ckpt.generator_config)) {
    fail(ErrorCode::kFormat, "GAN checkpoint generator layers disagree with its configuration");
  }
  return ckpt;
}

void save_gan(GanCheckpoint& ckpt, const std::filesystem::path& path) {
  util::write_file(path, encode_gan(ckpt));
}

GanCheckpoint load_gan(const std::filesystem::path& path) {
  return decode_gan(util::read_file(path));
}

std::vector<codec::ModelSpectrogram> to_spectrograms(const nn::Tensor<float>& batch,
                                                     const GanCheckpoint& ckpt) {
  if (batch.rank() != 4 || batch.dim(1) != 1) {
    fail(ErrorCode::kDimension, "expected (N, 1, H, W) samples, got " + nn::shape_str(batch.shape()));
  }
  const std::int64_t h = batch.dim(2), w = batch.dim(3);
  std::vector<codec::ModelSpectrogram> out;
  for (std::int64_t n = 0; n < batch.dim(0); ++n) {
    codec::ModelSpectrogram s;
    s.data = Eigen::Map<const codec::ModelMatrix>(batch.data() + n * h * w, h, w);
    s.stats = ckpt.stats;
    s.config = ckpt.codec;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<codec::ModelSpectrogram> sample(const GanCheckpoint& ckpt,
                                            const std::vector<double>& label, std::uint64_t seed,
                                            int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  if (static_cast<int>(label.size()) != ckpt.label_dim()) {
    fail(ErrorCode::kDimension, "label has " + std::to_string(label.size()) +
                                    " entries, generator expects " + std::to_string(ckpt.label_dim()));
  }
  const auto z = sample_noise(n, ckpt.noise_dim(), seed);
  const auto c = label_batch(label, n);
  return to_spectrograms(generator_forward(*ckpt.generator, z, c), ckpt);
}

}  // namespace texvib::gan
