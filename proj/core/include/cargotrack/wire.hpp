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

#include <cstddef>
#include <string>

#include "cargotrack/types.hpp"

namespace cargotrack {

/// Batches are supposed to be kilobyte-scale; above this, the ingest side
/// logs a warning (soft check only, never a rejection).
inline constexpr std::size_t kBatchSoftLimitBytes = 256 * 1024;

/// Compact JSON with alphabetically ordered keys; byte-deterministic for a
/// given value. Optional fields (temp_c, hum_pct) are omitted when absent.
std::string serialize_batch(const UplinkBatch& batch);

/// Parses and shape-checks a batch document (field presence, types, raw
/// count ranges, battery range, non-empty records). Throws WireError.
/// Ordering of record timestamps is a semantic check left to the ingest
/// side so the rejection is observable there.
UplinkBatch parse_batch(const std::string& body);

/// One stored record as a single JSONL line (no trailing newline).
std::string serialize_stored_record(const StoredRecord& record);

/// Parses one JSONL line. Throws WireError.
StoredRecord parse_stored_record(const std::string& line);

}  // namespace cargotrack
