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

#include <cstddef>
#include <utility>
#include <vector>

#include "texvib/codec/types.hpp"

namespace texvib::codec {

/// Periodic Hamming window: w[n] = 0.54 - 0.46 cos(2 pi n / N).
std::vector<double> hamming_window(int size);

/// floor((length - fft_size) / hop) + 1; the trailing partial frame is dropped.
int frame_count(std::size_t length, const CodecConfig& cfg);

/// Length of the signal istft() produces for `frames` frames.
std::size_t synthesis_length(int frames, const CodecConfig& cfg);

/// Half-open sample range covered by the full fft_size/hop overlap of every
/// frame position (excludes the ramp-in and ramp-out of the first and last
/// frames).
std::pair<std::size_t, std::size_t> interior_range(int frames, const CodecConfig& cfg);

/// Hamming-windowed, unpadded STFT. Keeps bins 0..fft_size/2.
ComplexSpectrogram stft(const Waveform& wave, const CodecConfig& cfg);

/// Least-squares inverse: overlap-add of windowed frames normalized by the
/// summed squared window. Output length is synthesis_length(frames).
Waveform istft(const ComplexSpectrogram& spec, const CodecConfig& cfg);

}  // namespace texvib::codec
