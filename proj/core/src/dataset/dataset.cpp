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

#include "texvib/dataset/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "texvib/codec/model_domain.hpp"
#include "texvib/codec/stft.hpp"
#include "texvib/error.hpp"
#include "texvib/util/rng.hpp"

namespace texvib::dataset {

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(class_names.size(), 0);
  for (const auto& s : samples) {
    if (s.class_index >= 0 && static_cast<std::size_t>(s.class_index) < counts.size()) {
      ++counts[s.class_index];
    }
  }
  return counts;
}

void Dataset::validate() const {
  codec.validate();
  if (class_names.empty()) fail(ErrorCode::kInvalidArgument, "dataset has no classes");
  for (const auto& s : samples) {
    const std::string where = "sample '" + s.class_name + "/" + s.id + "'";
    if (s.class_index < 0 || static_cast<std::size_t>(s.class_index) >= class_names.size()) {
      fail(ErrorCode::kInvalidArgument, where + ": class index " + std::to_string(s.class_index) +
                                            " out of range for " +
                                            std::to_string(class_names.size()) + " classes");
    }
    if (class_names[s.class_index] != s.class_name) {
      fail(ErrorCode::kMismatch, where + ": class index " + std::to_string(s.class_index) +
                                     " is '" + class_names[s.class_index] + "'");
    }
    if (s.wave.sample_rate_hz != codec.sample_rate_hz) {
      fail(ErrorCode::kMismatch, where + ": sample rate " + std::to_string(s.wave.sample_rate_hz) +
                                     " Hz does not match codec rate " +
                                     std::to_string(codec.sample_rate_hz) + " Hz");
    }
    s.wave.validate();
    if (!s.image) fail(ErrorCode::kInvalidArgument, where + ": missing image");
    s.image->validate();
  }
}

std::string sample_key(const SamplePair& s) { return s.class_name + "/" + s.id; }

namespace {

Dataset empty_like(const Dataset& data) {
  Dataset out;
  out.class_names = data.class_names;
  out.codec = data.codec;
  return out;
}

}  // namespace

Split split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument,
         "split: test fraction must be in (0, 1), got " + std::to_string(test_fraction));
  }
  std::vector<std::vector<std::size_t>> by_class(data.class_names.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    by_class.at(data.samples[i].class_index).push_back(i);
  }
  std::vector<bool> is_test(data.samples.size(), false);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 2) {
      fail(ErrorCode::kInvalidArgument, "split: class '" + data.class_names[c] + "' has " +
                                            std::to_string(idx.size()) +
                                            " sample(s); both splits need at least one");
    }
    const auto n = static_cast<long>(idx.size());
    const long n_test = std::clamp(std::lround(static_cast<double>(n) * test_fraction), 1L, n - 1);
    util::Rng rng(util::derive_seed(seed, {c}));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (long k = 0; k < n_test; ++k) is_test[idx[k]] = true;
  }
  Split out{empty_like(data), empty_like(data)};
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    (is_test[i] ? out.test : out.train).samples.push_back(data.samples[i]);
  }
  return out;
}

Split split_by_ids(const Dataset& data, const std::vector<std::string>& test_keys) {
  std::unordered_set<std::string> keys(test_keys.begin(), test_keys.end());
  Split out{empty_like(data), empty_like(data)};
  std::size_t matched = 0;
  for (const auto& s : data.samples) {
    const bool test = keys.count(sample_key(s)) > 0;
    matched += test ? 1 : 0;
    (test ? out.test : out.train).samples.push_back(s);
  }
  if (matched != keys.size()) {
    fail(ErrorCode::kMismatch, "split: " + std::to_string(keys.size() - matched) +
                                   " test id(s) do not name a sample in the dataset");
  }
  return out;
}

codec::NormStats compute_norm_stats(const Dataset& train, const codec::CodecConfig& cfg) {
  cfg.validate();
  if (train.samples.empty()) fail(ErrorCode::kInvalidArgument, "compute_norm_stats: empty dataset");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const int bins = cfg.crop_bins();
  for (const auto& s : train.samples) {
    const auto spec = codec::stft(s.wave, cfg);
    if (spec.data.cols() < cfg.model_time_frames) {
      fail(ErrorCode::kDimension, "compute_norm_stats: sample '" + sample_key(s) + "' yields " +
                                      std::to_string(spec.data.cols()) + " frames, need " +
                                      std::to_string(cfg.model_time_frames));
    }
    const auto block = spec.data.topLeftCorner(bins, cfg.model_time_frames).cwiseAbs();
    lo = std::min(lo, block.minCoeff());
    hi = std::max(hi, block.maxCoeff());
  }
  if (!(hi > 0.0) || !std::isfinite(hi)) {
    fail(ErrorCode::kNumeric, "compute_norm_stats: training signals are silent in the model crop");
  }
  codec::NormStats stats;
  stats.log_max = 20.0 * std::log10(hi);
  const double floor_db = stats.log_max + cfg.log_floor_db;
  stats.log_min = lo > 0.0 ? std::max(20.0 * std::log10(lo), floor_db) : floor_db;
  // A spectrum with one magnitude everywhere still needs a non-empty range.
  if (!(stats.log_min < stats.log_max)) stats.log_min = floor_db;
  return stats;
}

std::vector<codec::ModelMatrix> model_spectrograms(const Dataset& data,
                                                   const codec::NormStats& stats) {
  std::vector<codec::ModelMatrix> out;
  out.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    out.push_back(codec::to_model_domain(codec::stft(s.wave, data.codec), stats, data.codec).data);
  }
  return out;
}

gan::GanTrainingData gan_training_data(const Dataset& train, const codec::NormStats& stats) {
  gan::GanTrainingData out;
  out.spectrograms = model_spectrograms(train, stats);
  out.labels.reserve(train.samples.size());
  for (const auto& s : train.samples) out.labels.push_back(s.class_index);
  out.class_names = train.class_names;
  out.stats = stats;
  out.codec = train.codec;
  return out;
}

encoder::LabeledImages labeled_images(const Dataset& data) {
  encoder::LabeledImages out;
  out.images.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    out.images.push_back(s.image);
    out.labels.push_back(s.class_index);
  }
  return out;
}

}  // namespace texvib::dataset
