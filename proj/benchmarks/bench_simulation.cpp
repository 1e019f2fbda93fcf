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

#include <string>

#include <benchmark/benchmark.h>

#include "cargotrack/scenario.hpp"
#include "cargotrack/simulation.hpp"

namespace {

using namespace cargotrack;

const Scenario& demo_scenario() {
  static const Scenario scenario =
      load_scenario(std::string(CARGOTRACK_SCENARIO_DIR) + "/demo_voyage.json");
  return scenario;
}

// The bundled 6-hour voyage: ambient noise, shocks, coverage gaps.
void BM_SimulateDemoVoyage(benchmark::State& state) {
  const Scenario& scenario = demo_scenario();
  const DeviceConfig config = scenario.device_config.value_or(DeviceConfig{});
  std::uint64_t seed = 1;
  std::int64_t samples = 0;
  for (auto _ : state) {
    const JourneyLog log = run_simulation(scenario, config, seed++);
    benchmark::DoNotOptimize(log.captures.size());
    samples += log.total_samples;
  }
  state.SetItemsProcessed(samples);
}
BENCHMARK(BM_SimulateDemoVoyage)->Unit(benchmark::kMillisecond);

// A quiet month: exercises the silent-span fast-forward rather than the
// per-sample loop.
void BM_SimulateQuietMonth(benchmark::State& state) {
  const EpochMs end = 30LL * 86400 * 1000;
  Scenario scenario;
  scenario.name = "quiet-month";
  scenario.start_ts = 0;
  scenario.waypoints = {{0, 0.0, 0.0}, {end, 1.0, 1.0}};
  scenario.legs = {{"soak", LegKind::kLand, 0, end, DisplayColor::kOther}};
  scenario.coverage = {{0, end + 1, NetworkSet{true, true}}};
  scenario.ambient_g_rms = 0.0;
  scenario.device_id = "bench-dev";
  scenario.validate();

  std::int64_t samples = 0;
  for (auto _ : state) {
    const JourneyLog log = run_simulation(scenario, DeviceConfig{}, 42);
    benchmark::DoNotOptimize(log.final_battery_pct);
    samples += log.total_samples;
  }
  state.SetItemsProcessed(samples);
}
BENCHMARK(BM_SimulateQuietMonth)->Unit(benchmark::kMillisecond);

}  // namespace
