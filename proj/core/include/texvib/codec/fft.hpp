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

#include <complex>
#include <memory>
#include <span>

namespace texvib::codec {

/// Real-input DFT of a fixed length (any length, not just powers of two).
///
/// forward:  X[k] = sum_n x[n] e^{-2 pi i k n / N},  k = 0..N/2
/// inverse:  x[n] = (1/N) sum_k X[k] e^{+2 pi i k n / N} (Hermitian extension)
///
/// Instances are cheap handles onto a process-wide plan cache and may be used
/// concurrently from several threads.
class RealFft {
 public:
  explicit RealFft(int size);

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

  struct Plans;  // opaque FFTW state

 private:
  int size_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace texvib::codec
