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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cargotrack/device.hpp"
#include "cargotrack/scenario.hpp"
#include "cargotrack/types.hpp"

namespace cargotrack {

/// Everything one simulation run produced. `captures` is the ground-truth
/// list of every triggered record, taken before any buffer eviction, so the
/// conservation ledger can be checked exactly:
///   acked_record_count() + buffered_at_end + dropped_count == captures.
struct JourneyLog {
  std::string scenario_name;
  std::string device_id;
  std::uint64_t seed = 0;
  EpochMs start_ts = 0;
  EpochMs end_ts = 0;
  std::int64_t total_samples = 0;

  std::vector<SensorRecord> captures;
  std::vector<UplinkBatch> batches;       // every emission; retries repeat a seq
  std::vector<FlushEvent> flush_events;   // every established connection
  std::vector<SensorRecord> buffered_at_end;
  std::uint64_t dropped_count = 0;
  double final_battery_pct = 0.0;

  /// Records carried by acked batch emissions (each seq acked at most once).
  std::size_t acked_record_count() const;

  /// Exact conservation-of-events ledger.
  bool conservation_holds() const;
};

/// Step the device across the scenario at sample_rate_hz. Ticks land at
/// start + floor(i * 1000 / rate) ms, inclusive of the journey end.
/// `channel` decides uplink acks (nullptr: every uplink acked, which is
/// what offline runs want). Identical (scenario, config, seed) inputs yield
/// a bit-identical JourneyLog.
JourneyLog run_simulation(const Scenario& scenario, const DeviceConfig& config,
                          std::uint64_t seed, const UplinkChannel& channel = nullptr);

/// Line-delimited JSON export of a journey log (meta line, one line per
/// capture / flush / batch / leftover record, final summary line).
/// Deterministic byte-for-byte for a given log.
std::string serialize_journey_log(const JourneyLog& log);

}  // namespace cargotrack
