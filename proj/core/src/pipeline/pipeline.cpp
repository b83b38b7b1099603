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

#include "texvib/pipeline/pipeline.hpp"

#include "texvib/codec/model_domain.hpp"
#include "texvib/error.hpp"
#include "texvib/gan/label.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::pipeline {

namespace {

constexpr std::uint64_t kPhaseStream = 0x9a5e;

}  // namespace

LabelOutput generate_from_label(const gan::GanCheckpoint& gan, const std::vector<double>& label,
                                std::uint64_t seed, int glim_iters) {
  if (glim_iters < 1) fail(ErrorCode::kInvalidArgument, "Griffin-Lim needs at least 1 iteration");
  const auto violation = gan::simplex_violation(label, gan::kSimplexTolerance);
  if (!violation.empty()) fail(ErrorCode::kInvalidArgument, "label vector " + violation);
  LabelOutput out;
  out.spectrogram = std::move(gan::sample(gan, label, seed, 1).front());
  const auto mag = codec::from_model_domain(out.spectrogram, gan.codec);
  out.wave = codec::griffin_lim(mag, gan.codec, glim_iters, util::derive_seed(seed, {kPhaseStream}))
                 .wave;
  return out;
}

void check_compatible(const encoder::EncoderCheckpoint& enc, const gan::GanCheckpoint& gan) {
  if (enc.class_names == gan.class_names) return;
  std::string detail;
  const auto n = std::min(enc.class_names.size(), gan.class_names.size());
  for (std::size_t i = 0; i < n && detail.empty(); ++i) {
    if (enc.class_names[i] != gan.class_names[i]) {
      detail = "class " + std::to_string(i) + " is '" + enc.class_names[i] + "' in the encoder but '" +
               gan.class_names[i] + "' in the generator";
    }
  }
  if (detail.empty()) {
    detail = "encoder has " + std::to_string(enc.class_names.size()) + " classes, generator has " +
             std::to_string(gan.class_names.size());
  }
  fail(ErrorCode::kMismatch, "checkpoint class lists differ: " + detail);
}

ImageOutput generate_from_image(const encoder::EncoderCheckpoint& enc,
                                const gan::GanCheckpoint& gan, const encoder::TextureImage& img,
                                std::uint64_t seed, int glim_iters, encoder::EncodeMode mode) {
  check_compatible(enc, gan);
  if (mode == encoder::EncodeMode::kRawLogits) {
    fail(ErrorCode::kInvalidArgument, "raw logits are not a valid generator label");
  }
  ImageOutput out;
  out.label = encoder::encode(enc, img, mode);
  auto gen = generate_from_label(gan, out.label, seed, glim_iters);
  out.spectrogram = std::move(gen.spectrogram);
  out.wave = std::move(gen.wave);
  return out;
}

}  // namespace texvib::pipeline
