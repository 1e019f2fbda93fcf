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

#include "cargotrack/analytics.hpp"
#include "cargotrack/report.hpp"

namespace {

using namespace cargotrack;

std::vector<StoredRecord> journey_records(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> counts(-500, 500);
  std::vector<StoredRecord> records(n);
  EpochMs ts = 0;
  for (StoredRecord& r : records) {
    r.device_id = "bench-dev";
    r.seq = 0;
    r.ts = (ts += 37);
    r.battery_pct = 80.0;
    r.x = counts(rng);
    r.y = counts(rng);
    r.z = counts(rng);
    r.lat = 19.0;
    r.lon = 72.8;
  }
  return records;
}

std::vector<LegDef> three_legs(EpochMs end) {
  return {
      {"truck-out", LegKind::kLand, 0, end / 3, DisplayColor::kRed},
      {"ship", LegKind::kSea, end / 3, 2 * end / 3, DisplayColor::kBlue},
      {"truck-in", LegKind::kLand, 2 * end / 3, end, DisplayColor::kGreen},
  };
}

void BM_RawToGforce(benchmark::State& state) {
  const auto records = journey_records(4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(raw_to_gforce(records[i++ & 4095].accel(), 0.03125));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RawToGforce);

// Full conversion + classification + leg attribution + per-leg stats.
void BM_Aggregate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto records = journey_records(n);
  const auto legs = three_legs(records.back().ts + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(aggregate(records, legs, 0.03125, 8.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Aggregate)->Arg(1000)->Arg(100000);

// Deterministic SVG emission for a 2k-impact journey.
void BM_RenderImpactPlot(benchmark::State& state) {
  const auto records = journey_records(2000);
  const auto legs = three_legs(records.back().ts + 1);
  const AggregateResult result = aggregate(records, legs, 0.03125, 8.0);

  ReportSpec spec;
  spec.title = "bench";
  spec.device_id = "bench-dev";
  spec.from_ts = 0;
  spec.to_ts = records.back().ts + 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_impact_plot(result.impacts, legs, spec));
  }
}
BENCHMARK(BM_RenderImpactPlot);

}  // namespace
