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
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cargotrack/types.hpp"

namespace cargotrack {

/// Simulation-side truth for the accelerometer's physical mapping: one g of
/// true acceleration is 32 raw counts, so the +/-512 scale spans +/-16 g.
/// Analytics never sees this constant; it estimates the inverse (lambda)
/// from drop trials.
inline constexpr double kDefaultCountsPerG = 32.0;

/// Three-term battery model: constant idle draw, a per-sample sensing cost,
/// and a per-connection uplink cost (the dominant term in practice).
struct BatteryParams {
  double capacity_mah = 1000.0;
  double idle_ma = 0.19;            // baseline draw
  double sample_ua_per_hz = 0.02;   // microamp-seconds consumed per sample
  double uplink_mah_per_flush = 1.2;

  void validate() const;  // throws ValidationError
};

struct DeviceConfig {
  int capture_threshold_counts = 64;  // 2 g at the default mapping
  int sample_rate_hz = 100;
  int buffer_capacity = 4096;
  int flush_interval_s = 86400;
  BatteryParams battery;
  std::vector<NetworkKind> network_preference = {NetworkKind::kThreeG, NetworkKind::kTwoG};

  void validate() const;  // throws ValidationError
};

/// Quantize a true acceleration (g units) to raw counts. Each component is
/// round(component * counts_per_g) with ties away from zero, saturated to
/// [-512, +512]. Saturation is silent: overload is capped, never an error.
RawTriple quantize_acceleration(const Vec3& accel_g, double counts_per_g);

/// True iff the sample magnitude strictly exceeds the threshold. Compares
/// x^2+y^2+z^2 > threshold^2 in exact integer arithmetic.
bool detect_trigger(const RawTriple& sample, int threshold_counts);

/// Battery percentage left after `elapsed_s` seconds of idle draw,
/// `samples_taken` sensor reads and `flushes` cloud connections.
/// Clamped at zero; never increases.
double battery_step(double state_pct, const BatteryParams& params, double elapsed_s,
                    std::int64_t samples_taken, int flushes);

/// True iff the flush schedule has fired. The interval boundary is
/// inclusive: due exactly at last_flush + interval.
bool uplink_due(EpochMs now_ts, EpochMs last_flush_ts, int flush_interval_s);

/// First member of `preference` present in `available`, else kNone
/// (flush deferred, buffer retained).
NetworkKind select_network(std::span<const NetworkKind> preference, const NetworkSet& available);

/// Bounded capture buffer. Push keeps records in strictly increasing ts
/// order; overflow evicts the oldest record and counts it in
/// dropped_count(). Eviction is counted, never silent.
class EventBuffer {
 public:
  explicit EventBuffer(std::size_t capacity);

  /// Appends `record`. Throws ValidationError if record.ts does not
  /// strictly exceed the newest held timestamp.
  void push(const SensorRecord& record);

  /// Copy of everything currently held, oldest first.
  std::vector<SensorRecord> snapshot() const;

  /// Empties the buffer, counting the removed records as flushed.
  void clear_flushed();

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<SensorRecord>& records() const { return records_; }

  std::uint64_t dropped_count() const { return dropped_; }
  std::uint64_t total_pushed() const { return pushed_; }
  std::uint64_t total_flushed() const { return flushed_; }

 private:
  std::size_t capacity_;
  std::deque<SensorRecord> records_;
  std::uint64_t dropped_ = 0;
  std::uint64_t pushed_ = 0;
  std::uint64_t flushed_ = 0;
};

/// Emit the buffer contents as one batch over `network`. Returns nothing
/// and leaves the buffer untouched when no network is available or the
/// buffer is empty. The buffer is cleared only when `ack` is true; a failed
/// uplink leaves it intact so the same seq is retried later.
std::optional<UplinkBatch> flush_buffer(EventBuffer& buffer, NetworkKind network,
                                        const std::string& device_id, std::uint64_t seq,
                                        EpochMs flush_ts, double battery_pct, bool ack);

/// Delivery hook: given a built batch and the chosen network, returns
/// whether the upload was acknowledged. Defaults to always-acked when the
/// caller provides none.
using UplinkChannel = std::function<bool(const UplinkBatch&, NetworkKind)>;

/// One established cloud connection (scheduled flush with a network
/// available). records_sent is zero when the buffer was empty.
struct FlushEvent {
  EpochMs ts = 0;
  NetworkKind network = NetworkKind::kNone;
  std::uint64_t seq = 0;          // meaningful only when batch_emitted
  std::size_t records_sent = 0;
  bool batch_emitted = false;
  bool acked = false;
  double battery_pct = 0.0;       // after the connection cost
};

/// Discrete-time model of the sensor device: quantizes incoming samples,
/// captures threshold crossings into the bounded buffer, drains the battery
/// and uploads on schedule when a preferred network is reachable.
///
/// Battery accounting is settled lazily at event points (capture, flush,
/// end of run); the model is linear so the settled values equal per-tick
/// stepping.
class Device {
 public:
  Device(std::string device_id, DeviceConfig config, EpochMs start_ts,
         double counts_per_g = kDefaultCountsPerG);

  /// Feed one true-acceleration sample. Returns the captured record when
  /// the sample crossed the capture threshold.
  std::optional<SensorRecord> sample(EpochMs ts, const Vec3& accel_g, double lat, double lon,
                                     std::optional<double> temp_c = std::nullopt,
                                     std::optional<double> hum_pct = std::nullopt);

  /// Account for `n` sensor reads the caller already knows fall below the
  /// capture threshold. Only battery accounting is affected; the simulation
  /// loop uses this to step over quiet stretches without re-quantizing a
  /// constant signal.
  void tally_idle_samples(std::int64_t n) { samples_pending_ += n; }

  /// Offer a flush opportunity at `ts` given current coverage. Returns the
  /// connection event when one was established. `channel` decides the ack;
  /// nullptr means always acked. No reachable network defers the flush to
  /// the next tick; an established-but-refused uplink consumes the schedule
  /// slot and retries the same seq a full interval later.
  std::optional<FlushEvent> maybe_flush(EpochMs ts, const NetworkSet& available,
                                        const UplinkChannel& channel);

  /// Settle battery accounting up to `end_ts` (end of journey).
  void finish(EpochMs end_ts);

  const std::string& device_id() const { return device_id_; }
  const DeviceConfig& config() const { return config_; }
  double counts_per_g() const { return counts_per_g_; }
  double battery_pct() const { return battery_pct_; }
  const EventBuffer& buffer() const { return buffer_; }
  EpochMs last_flush_ts() const { return last_flush_ts_; }
  std::uint64_t next_seq() const { return seq_; }
  const UplinkBatch* last_batch() const { return last_batch_ ? &*last_batch_ : nullptr; }

 private:
  void settle_battery(EpochMs now_ts, int flushes);

  std::string device_id_;
  DeviceConfig config_;
  double counts_per_g_;
  EventBuffer buffer_;
  double battery_pct_ = 100.0;
  EpochMs last_flush_ts_;
  EpochMs last_settle_ts_;
  std::int64_t samples_pending_ = 0;
  std::uint64_t seq_ = 0;
  std::optional<UplinkBatch> last_batch_;
};

}  // namespace cargotrack
