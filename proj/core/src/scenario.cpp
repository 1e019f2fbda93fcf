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

#include "cargotrack/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cargotrack/analytics.hpp"
#include "cargotrack/errors.hpp"
#include "cargotrack/time_util.hpp"

namespace cargotrack {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

const json& member(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + key, "missing required field");
  return *it;
}

double number_field(const json& obj, const std::string& path, const char* key) {
  const json& v = member(obj, path, key);
  if (!v.is_number()) throw ValidationError(path + key, "must be a number");
  return v.get<double>();
}

int int_field(const json& obj, const std::string& path, const char* key) {
  const json& v = member(obj, path, key);
  if (!v.is_number_integer()) throw ValidationError(path + key, "must be an integer");
  return v.get<int>();
}

std::string string_field(const json& obj, const std::string& path, const char* key) {
  const json& v = member(obj, path, key);
  if (!v.is_string()) throw ValidationError(path + key, "must be a string");
  return v.get<std::string>();
}

/// Timestamps may be raw epoch milliseconds or RFC 3339 strings.
EpochMs ts_field(const json& obj, const std::string& path, const char* key) {
  const json& v = member(obj, path, key);
  const std::string field = path + key;
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_string()) {
    try {
      return parse_timestamp(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ValidationError(field, e.what());
    }
  }
  throw ValidationError(field, "must be epoch milliseconds or an RFC 3339 string");
}

json parse_document(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

DeviceConfig device_config_from_json(const json& obj, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "must be an object");
  DeviceConfig config;
  if (obj.contains("capture_threshold_counts")) {
    config.capture_threshold_counts = int_field(obj, path + ".", "capture_threshold_counts");
  }
  if (obj.contains("sample_rate_hz")) {
    config.sample_rate_hz = int_field(obj, path + ".", "sample_rate_hz");
  }
  if (obj.contains("buffer_capacity")) {
    config.buffer_capacity = int_field(obj, path + ".", "buffer_capacity");
  }
  if (obj.contains("flush_interval_s")) {
    config.flush_interval_s = int_field(obj, path + ".", "flush_interval_s");
  }
  if (obj.contains("battery")) {
    const json& b = member(obj, path + ".", "battery");
    if (!b.is_object()) throw ValidationError(path + ".battery", "must be an object");
    const std::string bp = path + ".battery.";
    if (b.contains("capacity_mah")) config.battery.capacity_mah = number_field(b, bp, "capacity_mah");
    if (b.contains("idle_ma")) config.battery.idle_ma = number_field(b, bp, "idle_ma");
    if (b.contains("sample_ua_per_hz")) {
      config.battery.sample_ua_per_hz = number_field(b, bp, "sample_ua_per_hz");
    }
    if (b.contains("uplink_mah_per_flush")) {
      config.battery.uplink_mah_per_flush = number_field(b, bp, "uplink_mah_per_flush");
    }
  }
  if (obj.contains("network_preference")) {
    const json& pref = obj.at("network_preference");
    if (!pref.is_array()) {
      throw ValidationError(path + ".network_preference", "must be an array");
    }
    config.network_preference.clear();
    for (std::size_t i = 0; i < pref.size(); ++i) {
      const std::string field = path + ".network_preference[" + std::to_string(i) + "]";
      if (!pref[i].is_string()) throw ValidationError(field, "must be a string");
      const auto kind = network_kind_from_string(pref[i].get<std::string>());
      if (!kind) {
        throw ValidationError(field, "unknown network kind \"" + pref[i].get<std::string>() + "\"");
      }
      config.network_preference.push_back(*kind);
    }
  }
  config.validate();
  return config;
}

}  // namespace

void Scenario::validate() const {
  if (name.empty()) throw ValidationError("name", "must be non-empty");
  if (waypoints.size() < 2) throw ValidationError("waypoints", "need at least 2 waypoints");
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i].ts <= waypoints[i - 1].ts) {
      throw ValidationError("waypoints[" + std::to_string(i) + "].ts",
                            "waypoint timestamps must be strictly increasing");
    }
  }
  if (start_ts != span_begin()) {
    throw ValidationError("start_ts", "must equal the first waypoint timestamp");
  }

  if (legs.empty()) throw ValidationError("legs", "need at least 1 leg");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const std::string path = "legs[" + std::to_string(i) + "]";
    if (legs[i].label.empty()) throw ValidationError(path + ".label", "must be non-empty");
    if (legs[i].label == kUnknownLegLabel) {
      throw ValidationError(path + ".label",
                            "\"" + std::string(kUnknownLegLabel) + "\" is reserved");
    }
    if (!labels.insert(legs[i].label).second) {
      throw ValidationError(path + ".label", "duplicate leg label \"" + legs[i].label + "\"");
    }
    if (legs[i].from_ts >= legs[i].to_ts) {
      throw ValidationError(path + ".from_ts", "leg interval must be non-empty");
    }
  }
  if (legs.front().from_ts != span_begin()) {
    throw ValidationError("legs[0].from_ts", "legs must start at the first waypoint timestamp");
  }
  for (std::size_t i = 0; i + 1 < legs.size(); ++i) {
    const EpochMs a = legs[i].to_ts;
    const EpochMs b = legs[i + 1].from_ts;
    if (b < a) {
      throw ValidationError("legs[" + std::to_string(i + 1) + "].from_ts",
                            "legs '" + legs[i].label + "' and '" + legs[i + 1].label +
                                "' overlap; legs must partition the journey span");
    }
    if (b > a) {
      throw ValidationError("legs[" + std::to_string(i + 1) + "].from_ts",
                            "gap between legs '" + legs[i].label + "' and '" +
                                legs[i + 1].label + "'; legs must partition the journey span");
    }
  }
  if (legs.back().to_ts != span_end()) {
    throw ValidationError("legs[" + std::to_string(legs.size() - 1) + "].to_ts",
                          "legs must end at the last waypoint timestamp");
  }

  for (std::size_t i = 0; i < coverage.size(); ++i) {
    if (coverage[i].from_ts >= coverage[i].to_ts) {
      throw ValidationError("coverage[" + std::to_string(i) + "].from_ts",
                            "coverage interval must be non-empty");
    }
  }

  for (std::size_t i = 0; i < shocks.size(); ++i) {
    const std::string path = "shocks[" + std::to_string(i) + "]";
    const ShockEvent& s = shocks[i];
    if (!(s.peak_g > 0.0)) throw ValidationError(path + ".peak_g", "must be positive");
    if (!(s.duration_ms > 0.0)) throw ValidationError(path + ".duration_ms", "must be positive");
    if (std::abs(s.axis.norm() - 1.0) > 1e-9) {
      throw ValidationError(path + ".axis", "must be a unit vector (|axis| = 1 within 1e-9)");
    }
    if (s.ts < span_begin() || s.ts > span_end()) {
      throw ValidationError(path + ".ts", "shock start must lie within the journey span");
    }
  }

  if (ambient_g_rms < 0.0) throw ValidationError("ambient_g_rms", "must be non-negative");
  if (device_id.empty()) throw ValidationError("device.id", "must be non-empty");
  if (device_config) device_config->validate();
}

double NoiseRng::gaussian() {
  // Irwin-Hall(12): the sum of twelve unit uniforms has variance exactly 1;
  // subtracting 6 centers it. Avoids std::normal_distribution, whose output
  // sequence is implementation-defined.
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) {
    sum += static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  return sum - 6.0;
}

Scenario parse_scenario_json(const std::string& text, const std::string& origin) {
  const json doc = parse_document(text, origin);
  if (!doc.is_object()) throw ValidationError("scenario", "document root must be an object");

  Scenario scenario;
  scenario.name = string_field(doc, "", "name");
  scenario.start_ts = ts_field(doc, "", "start_ts");

  const json& waypoints = member(doc, "", "waypoints");
  if (!waypoints.is_array()) throw ValidationError("waypoints", "must be an array");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const std::string path = "waypoints[" + std::to_string(i) + "].";
    const json& w = waypoints[i];
    if (!w.is_object()) throw ValidationError("waypoints[" + std::to_string(i) + "]", "must be an object");
    Waypoint wp;
    wp.ts = ts_field(w, path, "ts");
    wp.lat = number_field(w, path, "lat");
    wp.lon = number_field(w, path, "lon");
    scenario.waypoints.push_back(wp);
  }

  const json& legs = member(doc, "", "legs");
  if (!legs.is_array()) throw ValidationError("legs", "must be an array");
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const std::string path = "legs[" + std::to_string(i) + "].";
    const json& l = legs[i];
    if (!l.is_object()) throw ValidationError("legs[" + std::to_string(i) + "]", "must be an object");
    LegDef leg;
    leg.label = string_field(l, path, "label");
    const std::string kind_name = string_field(l, path, "kind");
    const auto kind = leg_kind_from_string(kind_name);
    if (!kind) throw ValidationError(path + "kind", "unknown leg kind \"" + kind_name + "\"");
    leg.kind = *kind;
    leg.from_ts = ts_field(l, path, "from_ts");
    leg.to_ts = ts_field(l, path, "to_ts");
    if (l.contains("display_color")) {
      const std::string color_name = string_field(l, path, "display_color");
      const auto color = display_color_from_string(color_name);
      if (!color) {
        throw ValidationError(path + "display_color", "unknown color \"" + color_name + "\"");
      }
      leg.display_color = *color;
    }
    scenario.legs.push_back(leg);
  }

  if (doc.contains("coverage")) {
    const json& coverage = doc.at("coverage");
    if (!coverage.is_array()) throw ValidationError("coverage", "must be an array");
    for (std::size_t i = 0; i < coverage.size(); ++i) {
      const std::string path = "coverage[" + std::to_string(i) + "].";
      const json& c = coverage[i];
      CoverageRegion region;
      region.from_ts = ts_field(c, path, "from_ts");
      region.to_ts = ts_field(c, path, "to_ts");
      const json& networks = member(c, path, "networks");
      if (!networks.is_array()) throw ValidationError(path + "networks", "must be an array");
      for (std::size_t j = 0; j < networks.size(); ++j) {
        const std::string field = path + "networks[" + std::to_string(j) + "]";
        if (!networks[j].is_string()) throw ValidationError(field, "must be a string");
        const auto kind = network_kind_from_string(networks[j].get<std::string>());
        if (!kind || *kind == NetworkKind::kNone) {
          throw ValidationError(field,
                                "unknown network kind \"" + networks[j].get<std::string>() + "\"");
        }
        if (*kind == NetworkKind::kThreeG) region.available.three_g = true;
        if (*kind == NetworkKind::kTwoG) region.available.two_g = true;
      }
      scenario.coverage.push_back(region);
    }
  }

  if (doc.contains("shocks")) {
    const json& shocks = doc.at("shocks");
    if (!shocks.is_array()) throw ValidationError("shocks", "must be an array");
    for (std::size_t i = 0; i < shocks.size(); ++i) {
      const std::string path = "shocks[" + std::to_string(i) + "].";
      const json& s = shocks[i];
      ShockEvent shock;
      shock.ts = ts_field(s, path, "ts");
      shock.peak_g = number_field(s, path, "peak_g");
      shock.duration_ms = number_field(s, path, "duration_ms");
      const json& axis = member(s, path, "axis");
      if (!axis.is_array() || axis.size() != 3 || !axis[0].is_number() || !axis[1].is_number() ||
          !axis[2].is_number()) {
        throw ValidationError(path + "axis", "must be an array of three numbers");
      }
      shock.axis = {axis[0].get<double>(), axis[1].get<double>(), axis[2].get<double>()};
      scenario.shocks.push_back(shock);
    }
  }

  if (doc.contains("ambient_g_rms")) {
    scenario.ambient_g_rms = number_field(doc, "", "ambient_g_rms");
  }

  if (doc.contains("env")) {
    const json& env = doc.at("env");
    if (!env.is_object()) throw ValidationError("env", "must be an object");
    if (env.contains("temp_c")) scenario.env_temp_c = number_field(env, "env.", "temp_c");
    if (env.contains("hum_pct")) scenario.env_hum_pct = number_field(env, "env.", "hum_pct");
  }

  if (doc.contains("device")) {
    const json& device = doc.at("device");
    if (!device.is_object()) throw ValidationError("device", "must be an object");
    if (device.contains("id")) scenario.device_id = string_field(device, "device.", "id");
    if (device.contains("config")) {
      scenario.device_config = device_config_from_json(device.at("config"), "device.config");
    }
  }

  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str(), path);
}

DeviceConfig parse_device_config_json(const std::string& text, const std::string& origin) {
  return device_config_from_json(parse_document(text, origin), "config");
}

std::vector<LegDef> parse_legs_json(const std::string& text, const std::string& origin) {
  const json doc = parse_document(text, origin);
  const json* array = nullptr;
  if (doc.is_array()) {
    array = &doc;
  } else if (doc.is_object() && doc.contains("legs") && doc.at("legs").is_array()) {
    array = &doc.at("legs");
  } else {
    throw ValidationError("legs", "expected an array of legs or a document with a \"legs\" array");
  }

  std::vector<LegDef> legs;
  for (std::size_t i = 0; i < array->size(); ++i) {
    const std::string path = "legs[" + std::to_string(i) + "].";
    const json& l = (*array)[i];
    if (!l.is_object()) throw ValidationError("legs[" + std::to_string(i) + "]", "must be an object");
    LegDef leg;
    leg.label = string_field(l, path, "label");
    const std::string kind_name = string_field(l, path, "kind");
    const auto kind = leg_kind_from_string(kind_name);
    if (!kind) throw ValidationError(path + "kind", "unknown leg kind \"" + kind_name + "\"");
    leg.kind = *kind;
    leg.from_ts = ts_field(l, path, "from_ts");
    leg.to_ts = ts_field(l, path, "to_ts");
    if (l.contains("display_color")) {
      const std::string color_name = string_field(l, path, "display_color");
      const auto color = display_color_from_string(color_name);
      if (!color) {
        throw ValidationError(path + "display_color", "unknown color \"" + color_name + "\"");
      }
      leg.display_color = *color;
    }
    legs.push_back(leg);
  }

  std::set<std::string> labels;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const std::string path = "legs[" + std::to_string(i) + "]";
    if (legs[i].label.empty()) throw ValidationError(path + ".label", "must be non-empty");
    if (legs[i].label == kUnknownLegLabel) {
      throw ValidationError(path + ".label",
                            "\"" + std::string(kUnknownLegLabel) + "\" is reserved");
    }
    if (!labels.insert(legs[i].label).second) {
      throw ValidationError(path + ".label", "duplicate leg label \"" + legs[i].label + "\"");
    }
    if (legs[i].from_ts >= legs[i].to_ts) {
      throw ValidationError(path + ".from_ts", "leg interval must be non-empty");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (legs[i].from_ts < legs[j].to_ts && legs[j].from_ts < legs[i].to_ts) {
        throw ValidationError(path, "legs '" + legs[j].label + "' and '" + legs[i].label +
                                        "' overlap");
      }
    }
  }
  return legs;
}

std::vector<LegDef> load_legs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_legs_json(buf.str(), path);
}

Vec3 true_acceleration_at(const Scenario& scenario, EpochMs ts, NoiseRng& rng) {
  if (ts < scenario.span_begin() || ts > scenario.span_end()) {
    throw std::out_of_range("ts outside journey span");
  }
  Vec3 accel{0.0, -1.0, 0.0};
  if (scenario.ambient_g_rms > 0.0) {
    accel.x += scenario.ambient_g_rms * rng.gaussian();
    accel.y += scenario.ambient_g_rms * rng.gaussian();
    accel.z += scenario.ambient_g_rms * rng.gaussian();
  }
  for (const ShockEvent& shock : scenario.shocks) {
    const double offset_ms = static_cast<double>(ts - shock.ts);
    if (offset_ms < 0.0 || offset_ms > shock.duration_ms) continue;
    const double pulse = shock.peak_g * std::sin(kPi * offset_ms / shock.duration_ms);
    accel = accel + shock.axis * pulse;
  }
  return accel;
}

NetworkSet coverage_at(const Scenario& scenario, EpochMs ts) {
  NetworkSet set;
  for (const CoverageRegion& region : scenario.coverage) {
    if (ts >= region.from_ts && ts < region.to_ts) {
      set.three_g = set.three_g || region.available.three_g;
      set.two_g = set.two_g || region.available.two_g;
    }
  }
  return set;
}

std::pair<double, double> position_at(const Scenario& scenario, EpochMs ts) {
  const auto& wps = scenario.waypoints;
  if (ts <= wps.front().ts) return {wps.front().lat, wps.front().lon};
  if (ts >= wps.back().ts) return {wps.back().lat, wps.back().lon};
  const auto it = std::upper_bound(wps.begin(), wps.end(), ts,
                                   [](EpochMs t, const Waypoint& w) { return t < w.ts; });
  const Waypoint& hi = *it;
  const Waypoint& lo = *(it - 1);
  const double f = static_cast<double>(ts - lo.ts) / static_cast<double>(hi.ts - lo.ts);
  return {lo.lat + (hi.lat - lo.lat) * f, lo.lon + (hi.lon - lo.lon) * f};
}

}  // namespace cargotrack
