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

#include "cargotrack/device.hpp"

#include <algorithm>
#include <cmath>

#include "cargotrack/errors.hpp"

namespace cargotrack {

namespace {

int quantize_component(double value_g, double counts_per_g) {
  const double scaled = std::round(value_g * counts_per_g);
  if (scaled >= kRawFullScale) return kRawFullScale;
  if (scaled <= -kRawFullScale) return -kRawFullScale;
  return static_cast<int>(scaled);
}

}  // namespace

void BatteryParams::validate() const {
  if (!(capacity_mah > 0.0)) {
    throw ValidationError("battery.capacity_mah", "must be positive");
  }
  if (idle_ma < 0.0 || sample_ua_per_hz < 0.0 || uplink_mah_per_flush < 0.0) {
    throw ValidationError("battery", "current draws must be non-negative");
  }
}

void DeviceConfig::validate() const {
  if (capture_threshold_counts < 0 || capture_threshold_counts > kMaxRawMagnitudeCounts) {
    throw ValidationError("capture_threshold_counts",
                          "must be in [0, " + std::to_string(kMaxRawMagnitudeCounts) + "]");
  }
  if (sample_rate_hz < 1 || sample_rate_hz > 1000) {
    throw ValidationError("sample_rate_hz", "must be in [1, 1000]");
  }
  if (buffer_capacity < 1) {
    throw ValidationError("buffer_capacity", "must be at least 1");
  }
  if (flush_interval_s < 1) {
    throw ValidationError("flush_interval_s", "must be at least 1");
  }
  for (NetworkKind kind : network_preference) {
    if (kind == NetworkKind::kNone) {
      throw ValidationError("network_preference", "NONE is not a selectable network");
    }
  }
  battery.validate();
}

RawTriple quantize_acceleration(const Vec3& accel_g, double counts_per_g) {
  return {quantize_component(accel_g.x, counts_per_g),
          quantize_component(accel_g.y, counts_per_g),
          quantize_component(accel_g.z, counts_per_g)};
}

bool detect_trigger(const RawTriple& sample, int threshold_counts) {
  const std::int64_t t = threshold_counts;
  return sample.magnitude_squared() > t * t;
}

double battery_step(double state_pct, const BatteryParams& params, double elapsed_s,
                    std::int64_t samples_taken, int flushes) {
  const double idle_mah = params.idle_ma * (elapsed_s / 3600.0);
  const double sample_mah =
      params.sample_ua_per_hz * 1e-3 * static_cast<double>(samples_taken) / 3600.0;
  const double uplink_mah = params.uplink_mah_per_flush * flushes;
  const double drained_pct = (idle_mah + sample_mah + uplink_mah) / params.capacity_mah * 100.0;
  return std::max(0.0, state_pct - drained_pct);
}

bool uplink_due(EpochMs now_ts, EpochMs last_flush_ts, int flush_interval_s) {
  return now_ts - last_flush_ts >= static_cast<EpochMs>(flush_interval_s) * 1000;
}

NetworkKind select_network(std::span<const NetworkKind> preference, const NetworkSet& available) {
  for (NetworkKind kind : preference) {
    if (available.contains(kind)) return kind;
  }
  return NetworkKind::kNone;
}

EventBuffer::EventBuffer(std::size_t capacity) : capacity_(capacity) {}

void EventBuffer::push(const SensorRecord& record) {
  if (!records_.empty() && record.ts <= records_.back().ts) {
    throw ValidationError("ts", "capture timestamps must be strictly increasing");
  }
  if (records_.size() == capacity_) {
    records_.pop_front();
    ++dropped_;
  }
  records_.push_back(record);
  ++pushed_;
}

std::vector<SensorRecord> EventBuffer::snapshot() const {
  return {records_.begin(), records_.end()};
}

void EventBuffer::clear_flushed() {
  flushed_ += records_.size();
  records_.clear();
}

std::optional<UplinkBatch> flush_buffer(EventBuffer& buffer, NetworkKind network,
                                        const std::string& device_id, std::uint64_t seq,
                                        EpochMs flush_ts, double battery_pct, bool ack) {
  if (network == NetworkKind::kNone || buffer.empty()) return std::nullopt;
  UplinkBatch batch;
  batch.device_id = device_id;
  batch.seq = seq;
  batch.flush_ts = flush_ts;
  batch.battery_pct = battery_pct;
  batch.records = buffer.snapshot();
  if (ack) buffer.clear_flushed();
  return batch;
}

Device::Device(std::string device_id, DeviceConfig config, EpochMs start_ts, double counts_per_g)
    : device_id_(std::move(device_id)),
      config_(std::move(config)),
      counts_per_g_(counts_per_g),
      buffer_(static_cast<std::size_t>(config_.buffer_capacity)),
      last_flush_ts_(start_ts),
      last_settle_ts_(start_ts) {
  config_.validate();
  if (!(counts_per_g_ > 0.0)) {
    throw ValidationError("counts_per_g", "must be positive");
  }
}

void Device::settle_battery(EpochMs now_ts, int flushes) {
  const double elapsed_s = static_cast<double>(now_ts - last_settle_ts_) / 1000.0;
  battery_pct_ = battery_step(battery_pct_, config_.battery, elapsed_s, samples_pending_, flushes);
  last_settle_ts_ = now_ts;
  samples_pending_ = 0;
}

std::optional<SensorRecord> Device::sample(EpochMs ts, const Vec3& accel_g, double lat, double lon,
                                           std::optional<double> temp_c,
                                           std::optional<double> hum_pct) {
  ++samples_pending_;
  const RawTriple raw = quantize_acceleration(accel_g, counts_per_g_);
  if (!detect_trigger(raw, config_.capture_threshold_counts)) return std::nullopt;

  settle_battery(ts, 0);
  SensorRecord record;
  record.ts = ts;
  record.battery_pct = battery_pct_;
  record.accel = raw;
  record.lat = lat;
  record.lon = lon;
  record.temp_c = temp_c;
  record.hum_pct = hum_pct;
  buffer_.push(record);
  return record;
}

std::optional<FlushEvent> Device::maybe_flush(EpochMs ts, const NetworkSet& available,
                                              const UplinkChannel& channel) {
  if (!uplink_due(ts, last_flush_ts_, config_.flush_interval_s)) return std::nullopt;
  const NetworkKind network = select_network(config_.network_preference, available);
  if (network == NetworkKind::kNone) return std::nullopt;  // defer; retry next tick

  // Establishing the connection costs battery even when there is nothing
  // to send.
  settle_battery(ts, 1);

  FlushEvent event;
  event.ts = ts;
  event.network = network;
  event.battery_pct = battery_pct_;

  if (buffer_.empty()) {
    // Scheduled check-in with an empty buffer: consume the schedule slot.
    last_flush_ts_ = ts;
    return event;
  }

  auto batch = flush_buffer(buffer_, network, device_id_, seq_, ts, battery_pct_,
                            /*ack=*/false);
  event.batch_emitted = true;
  event.seq = seq_;
  event.records_sent = batch->records.size();
  event.acked = channel ? channel(*batch, network) : true;
  last_batch_ = std::move(batch);

  // Acked or not, the connection consumed this schedule slot; a refused
  // uplink keeps the buffer and seq and re-sends the (possibly grown)
  // payload at the next interval. Retrying every tick would hammer a sick
  // endpoint and emit unbounded traffic on long journeys.
  last_flush_ts_ = ts;
  if (event.acked) {
    buffer_.clear_flushed();
    ++seq_;
  }
  return event;
}

void Device::finish(EpochMs end_ts) {
  settle_battery(end_ts, 0);
}

}  // namespace cargotrack
