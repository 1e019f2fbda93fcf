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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cargotrack/types.hpp"

namespace cargotrack {

/// Default g-force level separating damaging impacts from routine handling
/// in reports. Packaging-dependent; always overridable.
inline constexpr double kDefaultHighThresholdG = 8.0;

/// Bucket label for impacts that fall outside every leg.
inline constexpr const char* kUnknownLegLabel = "UNKNOWN";

/// One reference drop test: the known impact level and what the sensor read.
struct DropTrial {
  double known_g = 0.0;
  RawTriple raw;
};

/// The raw-counts-to-g conversion constant plus the trials it was fit from.
struct CalibrationConstant {
  double lambda = 0.0;  // g per count
  std::vector<DropTrial> fitted_from;
  double residual_rms = 0.0;
};

enum class ImpactClass { kHigh, kLow };

std::string_view to_string(ImpactClass klass);

/// A record after conversion, classification and leg attribution.
struct CalibratedImpact {
  EpochMs ts = 0;
  double v_g = 0.0;
  ImpactClass klass = ImpactClass::kLow;
  std::string leg_label;  // kUnknownLegLabel when outside all legs
  double lat = 0.0;
  double lon = 0.0;
};

/// Per-leg aggregation. kind is empty for the UNKNOWN bucket.
struct LegStats {
  std::string leg_label;
  std::optional<LegKind> kind;
  std::size_t n_total = 0;
  std::size_t n_high = 0;
  std::size_t n_low = 0;
  double max_g = 0.0;
  double mean_g = 0.0;
};

/// Impact value in g: lambda * sqrt(x^2 + y^2 + z^2), double precision.
/// Throws std::domain_error for non-positive lambda.
double raw_to_gforce(const RawTriple& raw, double lambda);

/// Least-squares-through-origin fit of lambda from drop trials:
/// lambda = sum(known_g_i * m_i) / sum(m_i^2) with m_i the raw magnitude.
/// The single-trial case degenerates to direct inversion. Throws
/// ValidationError on an empty trial list or a zero-magnitude raw reading
/// (naming the trial).
CalibrationConstant calibrate_lambda(const std::vector<DropTrial>& trials);

/// HIGH iff v_g >= high_threshold_g (boundary inclusive).
ImpactClass classify_impact(double v_g, double high_threshold_g);

/// Label of the unique leg containing ts. Intervals are half-open
/// [from_ts, to_ts); the final leg's to_ts is treated inclusive. Returns
/// kUnknownLegLabel outside all legs. Throws ValidationError when legs
/// overlap.
std::string assign_leg(EpochMs ts, std::span<const LegDef> legs);

struct AggregateResult {
  std::vector<CalibratedImpact> impacts;  // input order
  std::vector<LegStats> stats;            // legs in given order, UNKNOWN last
};

/// Map every record through raw_to_gforce / classify_impact / assign_leg
/// and fold per-leg stats. Per-leg n_total (UNKNOWN included) always sums
/// to the input count.
AggregateResult aggregate(std::span<const StoredRecord> records, std::span<const LegDef> legs,
                          double lambda, double high_threshold_g);

/// Drop-trial CSV: header "known_g,x,y,z", one trial per line. Throws
/// ParseError with the offending line number.
std::vector<DropTrial> parse_drop_trials_csv(const std::string& text, const std::string& origin);
std::vector<DropTrial> load_drop_trials_csv(const std::string& path);

}  // namespace cargotrack
