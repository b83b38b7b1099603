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

#include "texvib/codec/griffin_lim.hpp"
#include "texvib/encoder/encoder.hpp"
#include "texvib/gan/checkpoint.hpp"

namespace texvib::pipeline {

struct LabelOutput {
  codec::ModelSpectrogram spectrogram;
  codec::Waveform wave;
};

struct ImageOutput {
  std::vector<double> label;
  codec::ModelSpectrogram spectrogram;
  codec::Waveform wave;
};

/// G(z(seed), c) -> linear magnitude -> Griffin-Lim (phase seeded by `seed`).
/// `label` must lie on the simplex.
LabelOutput generate_from_label(const gan::GanCheckpoint& gan, const std::vector<double>& label,
                                std::uint64_t seed, int glim_iters = codec::kDefaultGriffinLimIters);

/// Throws kMismatch unless both checkpoints list the same classes in the
/// same order.
void check_compatible(const encoder::EncoderCheckpoint& enc, const gan::GanCheckpoint& gan);

/// encode() then generate_from_label(); kRawLogits is rejected.
ImageOutput generate_from_image(const encoder::EncoderCheckpoint& enc,
                                const gan::GanCheckpoint& gan, const encoder::TextureImage& img,
                                std::uint64_t seed, int glim_iters = codec::kDefaultGriffinLimIters,
                                encoder::EncodeMode mode = encoder::EncodeMode::kSoftmax);

}  // namespace texvib::pipeline
