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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "texvib/codec/types.hpp"
#include "texvib/encoder/encoder.hpp"
#include "texvib/encoder/image.hpp"
#include "texvib/gan/trainer.hpp"

namespace texvib::dataset {

/// One annotated recording: a texture photograph and the acceleration
/// trace captured while stroking it.
struct SamplePair {
  std::shared_ptr<const encoder::TextureImage> image;
  codec::Waveform wave;
  int class_index = 0;
  std::string class_name;
  std::string id;  // file stem, unique within the class
};

struct Dataset {
  std::vector<std::string> class_names;
  codec::CodecConfig codec;
  std::vector<SamplePair> samples;

  std::size_t size() const { return samples.size(); }
  std::vector<int> class_counts() const;

  /// Class indices in range, names consistent, rates equal to the codec rate,
  /// images and waves valid.
  void validate() const;
};

struct Split {
  Dataset train;
  Dataset test;
};

/// Stratified split: per class, round(n * test_fraction) samples (at least
/// one, at most n - 1) go to test. Sample order within each half follows the
/// input order.
Split split(const Dataset& data, double test_fraction, std::uint64_t seed);

/// Same partition as split() but keyed by explicit test ids ("class/id").
Split split_by_ids(const Dataset& data, const std::vector<std::string>& test_keys);

/// "class_name/id" for sample `s`.
std::string sample_key(const SamplePair& s);

/// Global dB range over the model crop of every sample. log_min is clamped
/// to log_floor_db below the peak.
codec::NormStats compute_norm_stats(const Dataset& train, const codec::CodecConfig& cfg);

/// Model-domain crop of every sample, in dataset order.
std::vector<codec::ModelMatrix> model_spectrograms(const Dataset& data, const codec::NormStats& stats);

gan::GanTrainingData gan_training_data(const Dataset& train, const codec::NormStats& stats);
encoder::LabeledImages labeled_images(const Dataset& data);

}  // namespace texvib::dataset
