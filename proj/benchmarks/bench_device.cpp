/*
 * Copyright (C) 2026 The cargotrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cargotrack/device.hpp"

namespace {

using namespace cargotrack;

std::vector<Vec3> ambient_samples(std::size_t n, double spread_g) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> axis(-spread_g, spread_g);
  std::vector<Vec3> samples(n);
  for (Vec3& v : samples) v = {axis(rng), axis(rng), axis(rng)};
  return samples;
}

// The per-sample filter on its own: quantize + threshold compare. This is
// the loop a real firmware would run at the sample rate.
void BM_QuantizeAndTrigger(benchmark::State& state) {
  const auto samples = ambient_samples(4096, 2.5);
  std::size_t i = 0;
  for (auto _ : state) {
    const RawTriple raw = quantize_acceleration(samples[i++ & 4095], kDefaultCountsPerG);
    benchmark::DoNotOptimize(detect_trigger(raw, 64));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QuantizeAndTrigger);

// Full device step including battery accounting and buffer bookkeeping.
// spread 0.5 g: quiet journey, nothing triggers. spread 2.5 g: rough road,
// a large fraction of samples become captures.
void BM_DeviceSample(benchmark::State& state) {
  const double spread = static_cast<double>(state.range(0)) / 10.0;
  const auto samples = ambient_samples(4096, spread);

  DeviceConfig config;
  config.buffer_capacity = 4096;
  Device device("bench", config, 0);

  EpochMs ts = 0;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(device.sample(++ts, samples[i++ & 4095], 19.0, 72.8));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DeviceSample)->Arg(5)->Arg(25);

}  // namespace
