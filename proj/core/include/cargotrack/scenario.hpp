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
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cargotrack/device.hpp"
#include "cargotrack/types.hpp"

namespace cargotrack {

/// Ground-truth shock: a half-sine pulse of peak_g along a unit axis,
/// active over [ts, ts + duration_ms].
struct ShockEvent {
  EpochMs ts = 0;          // pulse start
  double peak_g = 0.0;
  Vec3 axis;               // |axis| == 1 within 1e-9
  double duration_ms = 0.0;
};

/// Networks reachable during [from_ts, to_ts). Regions may overlap; what is
/// reachable at an instant is the union over containing regions.
struct CoverageRegion {
  EpochMs from_ts = 0;
  EpochMs to_ts = 0;
  NetworkSet available;
};

struct Waypoint {
  EpochMs ts = 0;
  double lat = 0.0;
  double lon = 0.0;
};

/// Deterministic journey model: position over time, labeled legs, coverage
/// and the true shock signal the device experiences.
struct Scenario {
  std::string name;
  EpochMs start_ts = 0;                // == waypoints.front().ts
  std::vector<Waypoint> waypoints;     // >= 2, strictly increasing ts
  std::vector<LegDef> legs;            // partition [first ts, last ts]
  std::vector<CoverageRegion> coverage;
  std::vector<ShockEvent> shocks;
  double ambient_g_rms = 0.0;          // per-axis vibration noise RMS, g

  std::optional<double> env_temp_c;    // constant pass-through fields
  std::optional<double> env_hum_pct;

  std::string device_id = "dev-001";
  std::optional<DeviceConfig> device_config;  // embedded "device.config"

  EpochMs span_begin() const { return waypoints.front().ts; }
  EpochMs span_end() const { return waypoints.back().ts; }

  /// Enforces every structural invariant; throws ValidationError naming the
  /// offending field.
  void validate() const;
};

/// Deterministic Gaussian source for ambient vibration noise. Each variate
/// is the sum of twelve 53-bit uniforms minus six: exactly zero mean and
/// unit variance, reproducible from the seed on any platform.
class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : gen_(seed) {}

  double gaussian();

 private:
  std::mt19937_64 gen_;
};

/// Parse and validate a scenario document. `origin` labels parse errors
/// (typically the file path).
Scenario parse_scenario_json(const std::string& text, const std::string& origin);
Scenario load_scenario(const std::string& path);

/// Parse a bare DeviceConfig JSON object (also used for --config files).
DeviceConfig parse_device_config_json(const std::string& text, const std::string& origin);

/// Parse a leg list for report attribution. Accepts a bare array of leg
/// objects, an object with a "legs" array, or a whole scenario document
/// (whose "legs" member is used). Legs are validated: unique labels,
/// non-empty intervals, pairwise non-overlapping.
std::vector<LegDef> parse_legs_json(const std::string& text, const std::string& origin);
std::vector<LegDef> load_legs(const std::string& path);

/// True acceleration in the device frame at `ts`, in g: gravity (0,-1,0)
/// plus per-axis ambient Gaussian noise plus the sum of active shock
/// pulses. Consumes exactly three noise variates per call when
/// ambient_g_rms > 0 and none otherwise. Throws std::out_of_range when ts
/// is outside the journey span.
Vec3 true_acceleration_at(const Scenario& scenario, EpochMs ts, NoiseRng& rng);

/// Union of reachable networks over all coverage regions containing `ts`.
NetworkSet coverage_at(const Scenario& scenario, EpochMs ts);

/// Piecewise-linear waypoint interpolation, clamped at the span ends.
/// Returns {lat, lon}.
std::pair<double, double> position_at(const Scenario& scenario, EpochMs ts);

}  // namespace cargotrack
