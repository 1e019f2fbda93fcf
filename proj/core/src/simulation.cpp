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

#include "cargotrack/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace cargotrack {

namespace {

constexpr EpochMs kNever = std::numeric_limits<EpochMs>::max();

/// Smallest tick index whose timestamp is >= target. Tick i sits at
/// start + floor(i * 1000 / rate).
std::int64_t first_tick_at_or_after(EpochMs target, EpochMs start, int rate) {
  if (target <= start) return 0;
  const EpochMs delta = target - start;
  return (delta * rate + 999) / 1000;
}

EpochMs tick_ts(std::int64_t i, EpochMs start, int rate) {
  return start + i * 1000 / rate;
}

/// Earliest coverage-region boundary strictly after ts (coverage is
/// piecewise constant between boundaries).
EpochMs next_coverage_boundary(const Scenario& scenario, EpochMs ts) {
  EpochMs next = kNever;
  for (const CoverageRegion& region : scenario.coverage) {
    if (region.from_ts > ts) next = std::min(next, region.from_ts);
    if (region.to_ts > ts) next = std::min(next, region.to_ts);
  }
  return next;
}

bool shock_active_at(const Scenario& scenario, EpochMs ts) {
  for (const ShockEvent& shock : scenario.shocks) {
    const double offset_ms = static_cast<double>(ts - shock.ts);
    if (offset_ms >= 0.0 && offset_ms <= shock.duration_ms) return true;
  }
  return false;
}

EpochMs next_shock_start(const Scenario& scenario, EpochMs ts) {
  EpochMs next = kNever;
  for (const ShockEvent& shock : scenario.shocks) {
    if (shock.ts > ts) next = std::min(next, shock.ts);
  }
  return next;
}

}  // namespace

std::size_t JourneyLog::acked_record_count() const {
  std::size_t count = 0;
  for (const FlushEvent& event : flush_events) {
    if (event.acked) count += event.records_sent;
  }
  return count;
}

bool JourneyLog::conservation_holds() const {
  return acked_record_count() + buffered_at_end.size() + dropped_count == captures.size();
}

JourneyLog run_simulation(const Scenario& scenario, const DeviceConfig& config,
                          std::uint64_t seed, const UplinkChannel& channel) {
  scenario.validate();
  config.validate();

  const EpochMs start = scenario.span_begin();
  const EpochMs end = scenario.span_end();
  const int rate = config.sample_rate_hz;
  const std::int64_t last_tick = (end - start) * rate / 1000;  // inclusive of journey end

  Device device(scenario.device_id, config, start);
  NoiseRng rng(seed);

  JourneyLog log;
  log.scenario_name = scenario.name;
  log.device_id = scenario.device_id;
  log.seed = seed;
  log.start_ts = start;
  log.end_ts = end;

  // When there is no ambient noise, a quiet tick reads exactly gravity; the
  // trigger outcome is the same every time, so quiet stretches can be
  // stepped over in one move (battery is linear in samples and time).
  const bool quiet_world = scenario.ambient_g_rms == 0.0;
  const bool gravity_triggers =
      detect_trigger(quantize_acceleration({0.0, -1.0, 0.0}, device.counts_per_g()),
                     config.capture_threshold_counts);
  const EpochMs interval_ms = static_cast<EpochMs>(config.flush_interval_s) * 1000;

  std::int64_t i = 0;
  while (i <= last_tick) {
    const EpochMs ts = tick_ts(i, start, rate);

    if (quiet_world && !gravity_triggers && !shock_active_at(scenario, ts)) {
      const bool due = uplink_due(ts, device.last_flush_ts(), config.flush_interval_s);
      const NetworkSet available = due ? coverage_at(scenario, ts) : NetworkSet{};
      const bool can_flush =
          due && select_network(config.network_preference, available) != NetworkKind::kNone;
      if (!can_flush) {
        // Nothing observable until the next shock, flush boundary or
        // coverage change: jump there.
        EpochMs wake = next_shock_start(scenario, ts);
        if (due) {
          wake = std::min(wake, next_coverage_boundary(scenario, ts));
        } else {
          wake = std::min(wake, device.last_flush_ts() + interval_ms);
        }
        std::int64_t next_i =
            wake == kNever ? last_tick + 1 : first_tick_at_or_after(wake, start, rate);
        next_i = std::clamp(next_i, i + 1, last_tick + 1);
        device.tally_idle_samples(next_i - i);
        log.total_samples += next_i - i;
        i = next_i;
        continue;
      }
    }

    const Vec3 accel = true_acceleration_at(scenario, ts, rng);
    const auto [lat, lon] = position_at(scenario, ts);
    ++log.total_samples;
    if (auto captured = device.sample(ts, accel, lat, lon, scenario.env_temp_c,
                                      scenario.env_hum_pct)) {
      log.captures.push_back(*captured);
    }

    if (auto flush = device.maybe_flush(ts, coverage_at(scenario, ts), channel)) {
      log.flush_events.push_back(*flush);
      if (flush->batch_emitted) log.batches.push_back(*device.last_batch());
    }
    ++i;
  }

  device.finish(end);
  log.buffered_at_end = device.buffer().snapshot();
  log.dropped_count = device.buffer().dropped_count();
  log.final_battery_pct = device.battery_pct();
  return log;
}

std::string serialize_journey_log(const JourneyLog& log) {
  using nlohmann::json;
  std::string out;
  auto emit = [&out](const json& line) {
    out += line.dump();
    out += '\n';
  };

  emit({{"type", "meta"},
        {"scenario", log.scenario_name},
        {"device_id", log.device_id},
        {"seed", log.seed},
        {"start_ts", log.start_ts},
        {"end_ts", log.end_ts}});

  auto record_line = [](const char* type, const SensorRecord& r) {
    json line{{"type", type},         {"ts", r.ts}, {"battery_pct", r.battery_pct},
              {"x", r.accel.x},       {"y", r.accel.y}, {"z", r.accel.z},
              {"lat", r.lat},         {"lon", r.lon}};
    if (r.temp_c) line["temp_c"] = *r.temp_c;
    if (r.hum_pct) line["hum_pct"] = *r.hum_pct;
    return line;
  };

  for (const SensorRecord& r : log.captures) emit(record_line("capture", r));

  for (const FlushEvent& e : log.flush_events) {
    emit({{"type", "flush"},
          {"ts", e.ts},
          {"network", std::string(to_string(e.network))},
          {"seq", e.seq},
          {"records_sent", e.records_sent},
          {"batch_emitted", e.batch_emitted},
          {"acked", e.acked},
          {"battery_pct", e.battery_pct}});
  }

  for (const UplinkBatch& b : log.batches) {
    emit({{"type", "batch"},
          {"device_id", b.device_id},
          {"seq", b.seq},
          {"flush_ts", b.flush_ts},
          {"battery_pct", b.battery_pct},
          {"record_count", b.records.size()},
          {"first_ts", b.records.front().ts},
          {"last_ts", b.records.back().ts}});
  }

  for (const SensorRecord& r : log.buffered_at_end) emit(record_line("buffered", r));

  emit({{"type", "final"},
        {"total_samples", log.total_samples},
        {"captures", log.captures.size()},
        {"acked_records", log.acked_record_count()},
        {"buffered_at_end", log.buffered_at_end.size()},
        {"dropped_count", log.dropped_count},
        {"final_battery_pct", log.final_battery_pct},
        {"conserved", log.conservation_holds()}});

  return out;
}

}  // namespace cargotrack
