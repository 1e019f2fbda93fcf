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

#include "cargotrack/types.hpp"

namespace cargotrack {

std::string_view to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::kThreeG: return "THREE_G";
    case NetworkKind::kTwoG: return "TWO_G";
    case NetworkKind::kNone: return "NONE";
  }
  return "NONE";
}

std::optional<NetworkKind> network_kind_from_string(std::string_view name) {
  if (name == "THREE_G") return NetworkKind::kThreeG;
  if (name == "TWO_G") return NetworkKind::kTwoG;
  if (name == "NONE") return NetworkKind::kNone;
  return std::nullopt;
}

std::string_view to_string(LegKind kind) {
  switch (kind) {
    case LegKind::kLand: return "LAND";
    case LegKind::kSea: return "SEA";
  }
  return "LAND";
}

std::optional<LegKind> leg_kind_from_string(std::string_view name) {
  if (name == "LAND") return LegKind::kLand;
  if (name == "SEA") return LegKind::kSea;
  return std::nullopt;
}

std::string_view to_string(DisplayColor color) {
  switch (color) {
    case DisplayColor::kRed: return "RED";
    case DisplayColor::kBlue: return "BLUE";
    case DisplayColor::kGreen: return "GREEN";
    case DisplayColor::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<DisplayColor> display_color_from_string(std::string_view name) {
  if (name == "RED") return DisplayColor::kRed;
  if (name == "BLUE") return DisplayColor::kBlue;
  if (name == "GREEN") return DisplayColor::kGreen;
  if (name == "OTHER") return DisplayColor::kOther;
  return std::nullopt;
}

StoredRecord make_stored_record(const std::string& device_id, std::uint64_t seq,
                                const SensorRecord& record) {
  StoredRecord out;
  out.device_id = device_id;
  out.seq = seq;
  out.ts = record.ts;
  out.battery_pct = record.battery_pct;
  out.x = record.accel.x;
  out.y = record.accel.y;
  out.z = record.accel.z;
  out.lat = record.lat;
  out.lon = record.lon;
  out.temp_c = record.temp_c;
  out.hum_pct = record.hum_pct;
  return out;
}

}  // namespace cargotrack
