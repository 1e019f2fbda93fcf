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
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cargotrack/types.hpp"

namespace cargotrack {

/// Semantic batch validation shared by the service and tests: non-empty
/// device id and records, strictly increasing record timestamps, raw counts
/// and battery within range. Returns a message naming the violation, or
/// nothing when the batch is well-formed.
std::optional<std::string> batch_violation(const UplinkBatch& batch);

enum class IngestStatus {
  kAccepted,      // persisted, acked
  kDuplicate,     // (device_id, seq) seen before; acked, nothing stored
  kUnauthorized,  // bad API key; nothing stored
  kMalformed,     // schema violation or unsorted records; nothing stored
  kBadRange,      // query with from_ts > to_ts
};

std::string_view to_string(IngestStatus status);

struct IngestResult {
  IngestStatus status = IngestStatus::kMalformed;
  std::size_t records_stored = 0;
  std::string detail;

  /// Duplicates are acked too: the device may clear its buffer either way.
  bool acked() const {
    return status == IngestStatus::kAccepted || status == IngestStatus::kDuplicate;
  }
};

/// Durable record store: append-only line-delimited JSON log plus an
/// in-memory index rebuilt on startup. Exactly-once persistence under
/// at-least-once delivery via two dedup layers: batch level on
/// (device_id, seq), record level on (device_id, ts).
///
/// Not thread-safe by itself; IngestService adds the locking.
class RecordStore {
 public:
  /// Memory-only store (no durability). Used by tests and offline report
  /// assembly.
  RecordStore();

  /// Opens (creating if needed) `data_dir`/records.jsonl and rebuilds the
  /// index from it. A trailing partial line (torn write) is ignored; any
  /// other malformed line raises ParseError with its line number.
  explicit RecordStore(const std::filesystem::path& data_dir);

  /// Ingest a validated batch. Returns kAccepted (with the number of
  /// records actually stored after record-level dedup) or kDuplicate.
  /// All-or-nothing: the log line block is written with a single write.
  IngestResult ingest(const UplinkBatch& batch);

  /// Records for `device_id` with from_ts <= ts <= to_ts (inclusive both
  /// ends), in increasing ts order. Precondition from_ts <= to_ts is the
  /// caller's job (IngestService maps it to kBadRange).
  std::vector<StoredRecord> query(const std::string& device_id, EpochMs from_ts,
                                  EpochMs to_ts) const;

  /// All records of one device in ts order.
  std::vector<StoredRecord> all_records(const std::string& device_id) const;

  std::vector<std::string> device_ids() const;
  bool has_device(const std::string& device_id) const;
  std::size_t size() const { return total_records_; }

  /// Flush the log stream to disk (graceful-shutdown hook).
  void flush_log();

  const std::filesystem::path& log_path() const { return log_path_; }

 private:
  void index_record(StoredRecord record);

  std::map<std::string, std::map<EpochMs, StoredRecord>> by_device_;
  std::map<std::string, std::set<std::uint64_t>> seen_seqs_;
  std::size_t total_records_ = 0;
  std::filesystem::path log_path_;  // empty for memory-only stores
  std::ofstream log_;
};

/// Authenticated, thread-safe facade over RecordStore: the data-layer
/// endpoint behind the HTTP surface. Ingests serialize under one lock, so
/// queries only ever observe fully ingested batches.
class IngestService {
 public:
  IngestService(RecordStore store, std::vector<std::string> api_keys);

  IngestResult ingest_batch(const UplinkBatch& batch, const std::string& api_key);

  /// Parse + validate + ingest a raw JSON body. Oversized bodies (soft
  /// limit) are still accepted but counted and logged.
  IngestResult ingest_json(const std::string& body, const std::string& api_key);

  struct QueryResult {
    IngestStatus status = IngestStatus::kUnauthorized;
    std::vector<StoredRecord> records;
    std::string detail;
  };

  QueryResult query_records(const std::string& device_id, EpochMs from_ts, EpochMs to_ts,
                            const std::string& api_key) const;

  /// Known device ids. `authorized` reports whether the key was valid; the
  /// list is empty when it was not.
  std::vector<std::string> device_ids(const std::string& api_key, bool& authorized) const;

  std::size_t store_size() const;
  std::uint64_t oversize_batches() const { return oversize_batches_; }
  void flush_log();

 private:
  bool key_valid(const std::string& api_key) const;

  mutable std::mutex mu_;
  RecordStore store_;
  std::vector<std::string> api_keys_;
  std::uint64_t oversize_batches_ = 0;
};

}  // namespace cargotrack
