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

// Scalar statistics used to check that a spectrogram or waveform carries a
// class's frequency signature.

#pragma once

#include <vector>

#include "texvib/codec/types.hpp"

namespace texvib::pipeline {

/// Row with the largest time-averaged value.
int dominant_row(const codec::ModelMatrix& m);

/// Element-wise mean of equally sized matrices.
codec::ModelMatrix mean_spectrogram(const std::vector<codec::ModelMatrix>& items);

/// Frequency of the largest non-DC DFT magnitude over the whole waveform.
double dominant_frequency_hz(const codec::Waveform& wave);

/// |a - b| <= tolerance_bins STFT bins of `cfg`.
bool within_bins(double a_hz, double b_hz, const codec::CodecConfig& cfg, double tolerance_bins);

/// Index of the reference closest to `hz`.
int nearest_reference(double hz, const std::vector<double>& reference_hz);

}  // namespace texvib::pipeline
