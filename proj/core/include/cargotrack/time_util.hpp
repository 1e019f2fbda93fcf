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

#include <string>

#include "cargotrack/types.hpp"

namespace cargotrack {

/// Parse either raw epoch milliseconds ("1000000000000") or an RFC 3339
/// timestamp ("2021-10-21T12:30:00Z", fractional seconds and numeric
/// offsets like "+05:30" accepted; fractions beyond milliseconds are
/// truncated). Throws ParseError.
EpochMs parse_timestamp(const std::string& text);

/// "YYYY-MM-DDTHH:MM:SSZ" (UTC).
std::string format_utc(EpochMs ts);

/// "YYYY-MM-DD HH:MM" (UTC) — compact form for axis labels.
std::string format_utc_minutes(EpochMs ts);

}  // namespace cargotrack
