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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "texvib/codec/griffin_lim.hpp"
#include "texvib/dataset/dataset.hpp"
#include "texvib/encoder/encoder.hpp"
#include "texvib/gan/checkpoint.hpp"

namespace texvib::pipeline {

inline constexpr const char* kReportSchema = "texvib-eval-v1";

struct EvalConfig {
  int samples_per_class = 32;
  std::uint64_t seed = 0;
  double tolerance_bins = 2.0;
  int glim_iters = codec::kDefaultGriffinLimIters;
  /// Per-class signature frequencies. When empty, the dominant row of each
  /// class's mean test spectrogram is used.
  std::vector<double> reference_hz;
  /// Cap on test images pushed through the image path (0 = all).
  int max_e2e_images = 0;
};

struct ClassReport {
  std::string name;
  double reference_hz = 0.0;
  int generated = 0;
  int test = 0;
  double aux_accuracy = 0.0;
  double signature_match_rate = 0.0;
  double mean_l2_to_test = 0.0;  // ||mean generated - mean test||_2

  bool operator==(const ClassReport&) const = default;
};

struct E2EReport {
  int images = 0;
  double encoder_accuracy = 0.0;
  double signature_match_rate = 0.0;  // dominant DFT frequency of the waveform

  bool operator==(const E2EReport&) const = default;
};

struct EvalReport {
  std::string schema = kReportSchema;
  std::vector<ClassReport> classes;
  double aux_accuracy = 0.0;
  double signature_match_rate = 0.0;
  double chance_rate = 0.0;
  double separation_score = 0.0;
  double inter_class_distance = 0.0;
  double intra_class_distance = 0.0;
  double tolerance_bins = 2.0;
  std::optional<E2EReport> e2e;

  bool operator==(const EvalReport&) const = default;
};

void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);
void write_report(const EvalReport& r, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);

/// Separation score: mean over k != j of ||G_k - T_j|| divided by mean over k
/// of ||G_k - T_k||, where G_k and T_k are class-mean generated and test
/// spectrograms.
double separation_score(const std::vector<codec::ModelMatrix>& generated_means,
                        const std::vector<codec::ModelMatrix>& test_means, double* inter = nullptr,
                        double* intra = nullptr);

/// Generates cfg.samples_per_class spectrograms per class and scores them
/// against `test`. With an encoder, also runs the image path over the test
/// images.
EvalReport eval_generated(const encoder::EncoderCheckpoint* enc, const gan::GanCheckpoint& gan,
                          const dataset::Dataset& test, const EvalConfig& cfg);

}  // namespace texvib::pipeline
