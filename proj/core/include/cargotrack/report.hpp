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

#include <span>
#include <string>

#include "cargotrack/analytics.hpp"
#include "cargotrack/simulation.hpp"
#include "cargotrack/types.hpp"

namespace cargotrack {

/// Fixed report palette.
///   RED #d62728, BLUE #1f77b4, GREEN #2ca02c, OTHER #7f7f7f
const char* display_color_hex(DisplayColor color);

struct ReportSpec {
  std::string title;
  std::string device_id;
  EpochMs from_ts = 0;
  EpochMs to_ts = 0;   // range must be non-empty (from < to)
  double high_threshold_g = kDefaultHighThresholdG;

  void validate() const;  // throws ValidationError
};

/// Per-leg impact bar chart as an SVG document: one vertical bar per impact
/// at its time position, height proportional to v_g, colored by its leg's
/// display color; dashed rule at the high/low threshold; vertical rules at
/// leg boundaries. Output is byte-deterministic (stable element order, no
/// embedded timestamps). Impacts must be sorted by ts (ValidationError
/// otherwise). 1200x400 viewBox, linear axes, g axis clipped at
/// 1.1 * max(max v_g, threshold).
std::string render_impact_plot(std::span<const CalibratedImpact> impacts,
                               std::span<const LegDef> legs, const ReportSpec& spec);

/// CSV "leg,kind,n_total,n_high,n_low,max_g,mean_g", one row per leg in the
/// given order (the UNKNOWN bucket is expected last). Reals carry six
/// significant digits.
std::string leg_stats_csv(std::span<const LegStats> stats);

/// CSV "ts,v_g,class,leg,lat,lon", one row per impact in the given order.
std::string impacts_csv(std::span<const CalibratedImpact> impacts);

/// leg_stats_csv written to `path`. Throws Error when the path is
/// unwritable.
void export_leg_csv(std::span<const LegStats> stats, const std::string& path);

/// Per-flush rows "flush_ts,battery_pct,records_sent" followed by a summary
/// line "summary,<days_elapsed>,<final_battery_pct>".
std::string battery_report_csv(const JourneyLog& journey);

/// Small helper shared by the CLI: write `content` to `path`, throwing
/// Error on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cargotrack
