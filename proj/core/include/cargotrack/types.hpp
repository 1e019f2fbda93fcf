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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cargotrack {

/// Milliseconds since the Unix epoch, UTC.
using EpochMs = std::int64_t;

/// Accelerometer full scale in raw counts per axis.
inline constexpr int kRawFullScale = 512;

/// Largest representable raw magnitude: ceil(sqrt(3) * 512).
inline constexpr int kMaxRawMagnitudeCounts = 887;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;
};

/// One quantized accelerometer sample. Every component is within
/// [-512, +512]; 0 means no acceleration on that axis.
struct RawTriple {
  int x = 0;
  int y = 0;
  int z = 0;

  /// Exact integer magnitude squared (fits comfortably in 64 bits).
  std::int64_t magnitude_squared() const {
    const std::int64_t xx = x, yy = y, zz = z;
    return xx * xx + yy * yy + zz * zz;
  }

  double magnitude() const { return std::sqrt(static_cast<double>(magnitude_squared())); }

  bool operator==(const RawTriple&) const = default;
};

enum class NetworkKind { kThreeG, kTwoG, kNone };

std::string_view to_string(NetworkKind kind);
std::optional<NetworkKind> network_kind_from_string(std::string_view name);

/// The set of cellular networks reachable at one instant.
struct NetworkSet {
  bool three_g = false;
  bool two_g = false;

  bool contains(NetworkKind kind) const {
    switch (kind) {
      case NetworkKind::kThreeG: return three_g;
      case NetworkKind::kTwoG: return two_g;
      case NetworkKind::kNone: return false;
    }
    return false;
  }

  bool empty() const { return !three_g && !two_g; }
  bool operator==(const NetworkSet&) const = default;
};

/// One captured sample: what the device uploads per impact event.
struct SensorRecord {
  EpochMs ts = 0;               // capture time, epoch ms UTC
  double battery_pct = 100.0;   // [0, 100]
  RawTriple accel;
  double lat = 0.0;             // WGS84 degrees
  double lon = 0.0;
  std::optional<double> temp_c;    // pass-through environment fields
  std::optional<double> hum_pct;

  bool operator==(const SensorRecord&) const = default;
};

/// Everything the device buffered, flushed in one cloud connection.
/// (device_id, seq) is the ingest idempotency key.
struct UplinkBatch {
  std::string device_id;
  std::uint64_t seq = 0;
  EpochMs flush_ts = 0;
  double battery_pct = 0.0;      // device battery at flush time
  std::vector<SensorRecord> records;  // non-empty, strictly increasing ts

  bool operator==(const UplinkBatch&) const = default;
};

/// A persisted record, flattened for the on-disk JSONL log. `seq` is the
/// batch that delivered it. (device_id, ts) is unique in the store.
struct StoredRecord {
  std::string device_id;
  std::uint64_t seq = 0;
  EpochMs ts = 0;
  double battery_pct = 0.0;
  int x = 0;
  int y = 0;
  int z = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::optional<double> temp_c;
  std::optional<double> hum_pct;

  RawTriple accel() const { return {x, y, z}; }
  bool operator==(const StoredRecord&) const = default;
};

StoredRecord make_stored_record(const std::string& device_id, std::uint64_t seq,
                                const SensorRecord& record);

enum class LegKind { kLand, kSea };

std::string_view to_string(LegKind kind);
std::optional<LegKind> leg_kind_from_string(std::string_view name);

enum class DisplayColor { kRed, kBlue, kGreen, kOther };

std::string_view to_string(DisplayColor color);
std::optional<DisplayColor> display_color_from_string(std::string_view name);

/// One labeled arm of the journey. Attribution intervals are half-open
/// [from_ts, to_ts); the final leg additionally owns its to_ts.
struct LegDef {
  std::string label;
  LegKind kind = LegKind::kLand;
  EpochMs from_ts = 0;
  EpochMs to_ts = 0;
  DisplayColor display_color = DisplayColor::kOther;

  bool operator==(const LegDef&) const = default;
};

}  // namespace cargotrack
