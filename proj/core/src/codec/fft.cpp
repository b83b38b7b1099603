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

#include "texvib/codec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "texvib/error.hpp"

namespace texvib::codec {

struct RealFft::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    // Plans live for the whole process; destruction happens at exit.
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const RealFft::Plans> plans_for(int n) {
  static std::map<int, std::shared_ptr<RealFft::Plans>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> cplx(static_cast<std::size_t>(n / 2 + 1));
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  auto plans = std::make_shared<RealFft::Plans>();
  plans->r2c = fftw_plan_dft_r2c_1d(n, real.data(), c, flags);
  plans->c2r = fftw_plan_dft_c2r_1d(n, c, real.data(), flags);
  if (!plans->r2c || !plans->c2r) {
    fail(ErrorCode::kInternal, "FFTW failed to plan a transform of size " + std::to_string(n));
  }
  cache.emplace(n, plans);
  return plans;
}

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size <= 0) fail(ErrorCode::kInvalidArgument, "FFT size must be positive");
  plans_ = plans_for(size);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (static_cast<int>(in.size()) != size_ || static_cast<int>(out.size()) != num_bins()) {
    fail(ErrorCode::kDimension, "RealFft::forward buffer size mismatch");
  }
  // r2c never writes its input, the cast only satisfies the C signature.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  if (static_cast<int>(in.size()) != num_bins() || static_cast<int>(out.size()) != size_) {
    fail(ErrorCode::kDimension, "RealFft::inverse buffer size mismatch");
  }
  // c2r clobbers its input, so work on a copy.
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / size_;
  for (double& v : out) v *= scale;
}

}  // namespace texvib::codec
