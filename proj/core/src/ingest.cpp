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

#include "cargotrack/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "cargotrack/errors.hpp"
#include "cargotrack/wire.hpp"

namespace cargotrack {

std::optional<std::string> batch_violation(const UplinkBatch& batch) {
  if (batch.device_id.empty()) return "device_id: must be non-empty";
  if (batch.records.empty()) return "records: must be non-empty";
  if (batch.battery_pct < 0.0 || batch.battery_pct > 100.0) {
    return "battery_pct: out of range [0, 100]";
  }
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const SensorRecord& r = batch.records[i];
    const std::string where = "records[" + std::to_string(i) + "]";
    if (i > 0 && r.ts <= batch.records[i - 1].ts) {
      return where + ".ts: record timestamps must be strictly increasing";
    }
    if (r.battery_pct < 0.0 || r.battery_pct > 100.0) {
      return where + ".battery_pct: out of range [0, 100]";
    }
    const auto in_range = [](int v) { return v >= -kRawFullScale && v <= kRawFullScale; };
    if (!in_range(r.accel.x) || !in_range(r.accel.y) || !in_range(r.accel.z)) {
      return where + ": raw counts out of range [-" + std::to_string(kRawFullScale) + ", " +
             std::to_string(kRawFullScale) + "]";
    }
  }
  return std::nullopt;
}

std::string_view to_string(IngestStatus status) {
  switch (status) {
    case IngestStatus::kAccepted: return "accepted";
    case IngestStatus::kDuplicate: return "duplicate";
    case IngestStatus::kUnauthorized: return "unauthorized";
    case IngestStatus::kMalformed: return "malformed";
    case IngestStatus::kBadRange: return "bad_range";
  }
  return "malformed";
}

RecordStore::RecordStore() = default;

RecordStore::RecordStore(const std::filesystem::path& data_dir) {
  std::filesystem::create_directories(data_dir);
  log_path_ = data_dir / "records.jsonl";

  bool terminate_tail = false;
  if (std::filesystem::exists(log_path_)) {
    std::ifstream in(log_path_, std::ios::binary);
    if (!in) throw Error(log_path_.string() + ": cannot open for rebuild");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();

    std::size_t pos = 0;
    std::size_t good_end = 0;
    std::size_t line_no = 1;
    while (pos < content.size()) {
      const std::size_t nl = content.find('\n', pos);
      if (nl == std::string::npos) {
        // No terminating newline: a torn final write. Keep it if it still
        // parses (only the newline was lost), drop it otherwise.
        const std::string tail = content.substr(pos);
        try {
          index_record(parse_stored_record(tail));
          good_end = content.size();
          terminate_tail = true;
        } catch (const WireError&) {
          // truncated below
        }
        break;
      }
      const std::string line = content.substr(pos, nl - pos);
      try {
        index_record(parse_stored_record(line));
      } catch (const WireError& e) {
        throw ParseError(log_path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      good_end = nl + 1;
      pos = nl + 1;
      ++line_no;
    }
    if (!terminate_tail && good_end < content.size()) {
      std::filesystem::resize_file(log_path_, good_end);
    }
  }

  log_.open(log_path_, std::ios::binary | std::ios::app);
  if (!log_) throw Error(log_path_.string() + ": cannot open for append");
  if (terminate_tail) {
    log_ << '\n';
    log_.flush();
  }
}

void RecordStore::index_record(StoredRecord record) {
  seen_seqs_[record.device_id].insert(record.seq);
  auto& per_device = by_device_[record.device_id];
  const EpochMs ts = record.ts;
  if (per_device.emplace(ts, std::move(record)).second) ++total_records_;
}

IngestResult RecordStore::ingest(const UplinkBatch& batch) {
  auto& seqs = seen_seqs_[batch.device_id];
  if (seqs.count(batch.seq)) {
    return {IngestStatus::kDuplicate, 0,
            "batch (" + batch.device_id + ", " + std::to_string(batch.seq) + ") already accepted"};
  }

  auto& per_device = by_device_[batch.device_id];
  std::vector<StoredRecord> fresh;
  fresh.reserve(batch.records.size());
  for (const SensorRecord& r : batch.records) {
    if (!per_device.count(r.ts)) {
      fresh.push_back(make_stored_record(batch.device_id, batch.seq, r));
    }
  }

  if (!log_path_.empty() && !fresh.empty()) {
    // One write call for the whole block, flushed before indexing: a reader
    // of the log never sees part of a batch followed by more of it later.
    std::string block;
    for (const StoredRecord& r : fresh) {
      block += serialize_stored_record(r);
      block += '\n';
    }
    log_.write(block.data(), static_cast<std::streamsize>(block.size()));
    log_.flush();
    if (!log_) throw Error(log_path_.string() + ": write failed");
  }

  seqs.insert(batch.seq);
  for (StoredRecord& r : fresh) {
    per_device.emplace(r.ts, std::move(r));
  }
  total_records_ += fresh.size();
  return {IngestStatus::kAccepted, fresh.size(), ""};
}

std::vector<StoredRecord> RecordStore::query(const std::string& device_id, EpochMs from_ts,
                                             EpochMs to_ts) const {
  std::vector<StoredRecord> out;
  const auto it = by_device_.find(device_id);
  if (it == by_device_.end()) return out;
  for (auto r = it->second.lower_bound(from_ts); r != it->second.end() && r->first <= to_ts; ++r) {
    out.push_back(r->second);
  }
  return out;
}

std::vector<StoredRecord> RecordStore::all_records(const std::string& device_id) const {
  std::vector<StoredRecord> out;
  const auto it = by_device_.find(device_id);
  if (it == by_device_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& [ts, record] : it->second) out.push_back(record);
  return out;
}

std::vector<std::string> RecordStore::device_ids() const {
  std::vector<std::string> out;
  out.reserve(by_device_.size());
  for (const auto& [id, records] : by_device_) out.push_back(id);
  return out;
}

bool RecordStore::has_device(const std::string& device_id) const {
  return by_device_.count(device_id) > 0;
}

void RecordStore::flush_log() {
  if (log_.is_open()) log_.flush();
}

IngestService::IngestService(RecordStore store, std::vector<std::string> api_keys)
    : store_(std::move(store)), api_keys_(std::move(api_keys)) {}

bool IngestService::key_valid(const std::string& api_key) const {
  return std::find(api_keys_.begin(), api_keys_.end(), api_key) != api_keys_.end();
}

IngestResult IngestService::ingest_batch(const UplinkBatch& batch, const std::string& api_key) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!key_valid(api_key)) return {IngestStatus::kUnauthorized, 0, "invalid API key"};
  if (auto violation = batch_violation(batch)) {
    return {IngestStatus::kMalformed, 0, *violation};
  }
  return store_.ingest(batch);
}

IngestResult IngestService::ingest_json(const std::string& body, const std::string& api_key) {
  UplinkBatch batch;
  try {
    batch = parse_batch(body);
  } catch (const WireError& e) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!key_valid(api_key)) return {IngestStatus::kUnauthorized, 0, "invalid API key"};
    return {IngestStatus::kMalformed, 0, e.what()};
  }
  if (body.size() > kBatchSoftLimitBytes) {
    std::lock_guard<std::mutex> lock(mu_);
    ++oversize_batches_;
    std::fprintf(stderr, "[ingest] warning: batch (%s, %llu) is %zu bytes (soft limit %zu)\n",
                 batch.device_id.c_str(), static_cast<unsigned long long>(batch.seq), body.size(),
                 kBatchSoftLimitBytes);
  }
  return ingest_batch(batch, api_key);
}

IngestService::QueryResult IngestService::query_records(const std::string& device_id,
                                                        EpochMs from_ts, EpochMs to_ts,
                                                        const std::string& api_key) const {
  std::lock_guard<std::mutex> lock(mu_);
  QueryResult result;
  if (!key_valid(api_key)) {
    result.status = IngestStatus::kUnauthorized;
    result.detail = "invalid API key";
    return result;
  }
  if (from_ts > to_ts) {
    result.status = IngestStatus::kBadRange;
    result.detail = "from_ts must not exceed to_ts";
    return result;
  }
  result.status = IngestStatus::kAccepted;
  result.records = store_.query(device_id, from_ts, to_ts);
  return result;
}

std::vector<std::string> IngestService::device_ids(const std::string& api_key,
                                                   bool& authorized) const {
  std::lock_guard<std::mutex> lock(mu_);
  authorized = key_valid(api_key);
  if (!authorized) return {};
  return store_.device_ids();
}

std::size_t IngestService::store_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return store_.size();
}

void IngestService::flush_log() {
  std::lock_guard<std::mutex> lock(mu_);
  store_.flush_log();
}

}  // namespace cargotrack
