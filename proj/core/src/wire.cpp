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

#include "cargotrack/wire.hpp"

#include <json.hpp>

#include "cargotrack/errors.hpp"

namespace cargotrack {

namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw WireError(where + ": missing field \"" + key + "\"");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw WireError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw WireError(where + ": field \"" + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

int raw_component(const json& obj, const char* key, const std::string& where) {
  const std::int64_t v = integer(obj, key, where);
  if (v < -kRawFullScale || v > kRawFullScale) {
    throw WireError(where + ": field \"" + key + "\" out of range [-" +
                    std::to_string(kRawFullScale) + ", " + std::to_string(kRawFullScale) + "]");
  }
  return static_cast<int>(v);
}

double battery(const json& obj, const std::string& where) {
  const double v = number(obj, "battery_pct", where);
  if (v < 0.0 || v > 100.0) {
    throw WireError(where + ": field \"battery_pct\" out of range [0, 100]");
  }
  return v;
}

json record_to_json(const SensorRecord& r) {
  json out{{"ts", r.ts},   {"battery_pct", r.battery_pct},
           {"x", r.accel.x}, {"y", r.accel.y},
           {"z", r.accel.z}, {"lat", r.lat},
           {"lon", r.lon}};
  if (r.temp_c) out["temp_c"] = *r.temp_c;
  if (r.hum_pct) out["hum_pct"] = *r.hum_pct;
  return out;
}

SensorRecord record_from_json(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw WireError(where + ": record must be an object");
  SensorRecord r;
  r.ts = integer(obj, "ts", where);
  r.battery_pct = battery(obj, where);
  r.accel = {raw_component(obj, "x", where), raw_component(obj, "y", where),
             raw_component(obj, "z", where)};
  r.lat = number(obj, "lat", where);
  r.lon = number(obj, "lon", where);
  if (obj.contains("temp_c")) r.temp_c = number(obj, "temp_c", where);
  if (obj.contains("hum_pct")) r.hum_pct = number(obj, "hum_pct", where);
  return r;
}

}  // namespace

std::string serialize_batch(const UplinkBatch& batch) {
  json records = json::array();
  for (const SensorRecord& r : batch.records) records.push_back(record_to_json(r));
  const json doc{{"device_id", batch.device_id},
                 {"seq", batch.seq},
                 {"flush_ts", batch.flush_ts},
                 {"battery_pct", batch.battery_pct},
                 {"records", std::move(records)}};
  return doc.dump();
}

UplinkBatch parse_batch(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw WireError(std::string("batch: ") + e.what());
  }
  if (!doc.is_object()) throw WireError("batch: document root must be an object");

  UplinkBatch batch;
  const json& id = require(doc, "device_id", "batch");
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw WireError("batch: field \"device_id\" must be a non-empty string");
  }
  batch.device_id = id.get<std::string>();

  const std::int64_t seq = integer(doc, "seq", "batch");
  if (seq < 0) throw WireError("batch: field \"seq\" must be non-negative");
  batch.seq = static_cast<std::uint64_t>(seq);

  batch.flush_ts = integer(doc, "flush_ts", "batch");
  batch.battery_pct = battery(doc, "batch");

  const json& records = require(doc, "records", "batch");
  if (!records.is_array()) throw WireError("batch: field \"records\" must be an array");
  if (records.empty()) throw WireError("batch: field \"records\" must be non-empty");
  batch.records.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    batch.records.push_back(record_from_json(records[i], "records[" + std::to_string(i) + "]"));
  }
  return batch;
}

std::string serialize_stored_record(const StoredRecord& record) {
  json doc{{"device_id", record.device_id},
           {"seq", record.seq},
           {"ts", record.ts},
           {"battery_pct", record.battery_pct},
           {"x", record.x},
           {"y", record.y},
           {"z", record.z},
           {"lat", record.lat},
           {"lon", record.lon}};
  if (record.temp_c) doc["temp_c"] = *record.temp_c;
  if (record.hum_pct) doc["hum_pct"] = *record.hum_pct;
  return doc.dump();
}

StoredRecord parse_stored_record(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw WireError(std::string("record: ") + e.what());
  }
  if (!doc.is_object()) throw WireError("record: line must be a JSON object");

  StoredRecord r;
  const json& id = require(doc, "device_id", "record");
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw WireError("record: field \"device_id\" must be a non-empty string");
  }
  r.device_id = id.get<std::string>();
  const std::int64_t seq = integer(doc, "seq", "record");
  if (seq < 0) throw WireError("record: field \"seq\" must be non-negative");
  r.seq = static_cast<std::uint64_t>(seq);
  r.ts = integer(doc, "ts", "record");
  r.battery_pct = battery(doc, "record");
  r.x = raw_component(doc, "x", "record");
  r.y = raw_component(doc, "y", "record");
  r.z = raw_component(doc, "z", "record");
  r.lat = number(doc, "lat", "record");
  r.lon = number(doc, "lon", "record");
  if (doc.contains("temp_c")) r.temp_c = number(doc, "temp_c", "record");
  if (doc.contains("hum_pct")) r.hum_pct = number(doc, "hum_pct", "record");
  return r;
}

}  // namespace cargotrack
