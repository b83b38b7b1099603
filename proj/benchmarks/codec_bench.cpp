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

#include <benchmark/benchmark.h>

#include <random>

#include "texvib/codec/griffin_lim.hpp"
#include "texvib/codec/model_domain.hpp"
#include "texvib/codec/stft.hpp"
#include "texvib/util/rng.hpp"

namespace {

using namespace texvib;

codec::Waveform noise(std::size_t n) {
  util::Rng rng(1);
  std::normal_distribution<double> normal;
  codec::Waveform w;
  w.samples.resize(n);
  for (auto& v : w.samples) v = normal(rng);
  return w;
}

void BM_Stft(benchmark::State& state) {
  const codec::CodecConfig cfg;
  const auto w = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(codec::stft(w, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Stft)->Arg(16768)->Arg(40000);

void BM_Istft(benchmark::State& state) {
  const codec::CodecConfig cfg;
  const auto spec = codec::stft(noise(16768), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(codec::istft(spec, cfg));
}
BENCHMARK(BM_Istft);

// One generator-sized inversion: 257 x 128 magnitude.
void BM_GriffinLim(benchmark::State& state) {
  const codec::CodecConfig cfg;
  const codec::MagnitudeMatrix mag = codec::stft(noise(16768), cfg).data.cwiseAbs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(codec::griffin_lim(mag, cfg, static_cast<int>(state.range(0)), 3));
  }
}
BENCHMARK(BM_GriffinLim)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from another compiler
// release and cannot be linked here.
BENCHMARK_MAIN();
