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
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "cargotrack/ingest.hpp"
#include "cargotrack/wire.hpp"

namespace {

using namespace cargotrack;

UplinkBatch make_batch(std::uint64_t seq, int records_per_batch) {
  UplinkBatch batch;
  batch.device_id = "bench-dev";
  batch.seq = seq;
  batch.battery_pct = 88.0;
  batch.records.reserve(records_per_batch);
  for (int i = 0; i < records_per_batch; ++i) {
    SensorRecord r;
    r.ts = static_cast<EpochMs>(seq) * 100000 + i;
    r.battery_pct = 88.0;
    r.accel = {static_cast<int>((seq + i) % 400), -120, 250};
    r.lat = 19.0;
    r.lon = 72.8;
    batch.records.push_back(r);
  }
  batch.flush_ts = batch.records.back().ts + 1;
  return batch;
}

// Fresh-batch ingestion into the in-memory store, 128 records per batch.
void BM_StoreIngest(benchmark::State& state) {
  RecordStore store;
  std::uint64_t seq = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.ingest(make_batch(seq++, 128)));
  }
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_StoreIngest);

// Duplicate detection: the same batch over and over must stay cheap.
void BM_StoreIngestDuplicate(benchmark::State& state) {
  RecordStore store;
  const UplinkBatch batch = make_batch(0, 128);
  store.ingest(batch);
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.ingest(batch));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StoreIngestDuplicate);

// Wire-format round trip of a 128-record batch (parse dominates ingest_json).
void BM_BatchParse(benchmark::State& state) {
  const std::string payload = serialize_batch(make_batch(7, 128));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_batch(payload));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(payload.size()));
}
BENCHMARK(BM_BatchParse);

// Range query against a 100k-record device at varying selectivity.
void BM_StoreQuery(benchmark::State& state) {
  static RecordStore* store = [] {
    auto* s = new RecordStore();
    for (std::uint64_t seq = 0; seq < 1000; ++seq) s->ingest(make_batch(seq, 100));
    return s;
  }();

  const EpochMs span = 1000 * 100000;
  const EpochMs width = span / state.range(0);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<EpochMs> start(0, span - width);
  for (auto _ : state) {
    const EpochMs from = start(rng);
    benchmark::DoNotOptimize(store->query("bench-dev", from, from + width));
  }
}
BENCHMARK(BM_StoreQuery)->Arg(1000)->Arg(10)->ArgNames({"span_div"});

}  // namespace
