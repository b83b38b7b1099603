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

#include <Eigen/Core>

#include "texvib/codec/types.hpp"

namespace texvib::codec {

/// Linear STFT magnitude, rows = bins (fft_size/2 + 1), cols = frames.
using MagnitudeMatrix = Eigen::MatrixXd;

/// Align-corners bilinear resize.
Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& src, Eigen::Index rows, Eigen::Index cols);

/// Linear magnitude below which values are clamped before the log:
/// log_floor_db below the dataset peak.
double floor_linear(const NormStats& stats, const CodecConfig& cfg);

/// |S| -> dB -> clamp to [log_min, log_max] -> [0, 1] -> crop (-> resize).
ModelSpectrogram to_model_domain(const ComplexSpectrogram& spec, const NormStats& stats,
                                 const CodecConfig& cfg);

/// Inverse of to_model_domain on the crop. Bins above the crop are zero;
/// the result has cfg.model_time_frames frames.
MagnitudeMatrix from_model_domain(const ModelSpectrogram& m, const CodecConfig& cfg);

}  // namespace texvib::codec
