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

#include "cargotrack/analytics.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cargotrack/errors.hpp"

namespace cargotrack {

namespace {

[[noreturn]] void csv_error(const std::string& origin, std::size_t line_no,
                            const std::string& message) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + message);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

double parse_double_field(const std::string& text, const std::string& origin,
                          std::size_t line_no, const char* name) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size() || text.empty()) {
    csv_error(origin, line_no, std::string("cannot parse ") + name + " \"" + text + "\"");
  }
  return v;
}

int parse_int_field(const std::string& text, const std::string& origin, std::size_t line_no,
                    const char* name) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    csv_error(origin, line_no, std::string("cannot parse ") + name + " \"" + text + "\"");
  }
  return v;
}

}  // namespace

std::string_view to_string(ImpactClass klass) {
  return klass == ImpactClass::kHigh ? "HIGH" : "LOW";
}

double raw_to_gforce(const RawTriple& raw, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  return lambda * raw.magnitude();
}

CalibrationConstant calibrate_lambda(const std::vector<DropTrial>& trials) {
  if (trials.empty()) throw ValidationError("trials", "need at least one drop trial");

  double sum_gm = 0.0;
  double sum_mm = 0.0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const std::string path = "trials[" + std::to_string(i) + "]";
    if (!(trials[i].known_g > 0.0)) {
      throw ValidationError(path + ".known_g", "must be positive");
    }
    const double m = trials[i].raw.magnitude();
    if (!(m > 0.0)) {
      throw ValidationError(path + ".raw", "raw magnitude must be positive");
    }
    sum_gm += trials[i].known_g * m;
    sum_mm += m * m;
  }

  CalibrationConstant result;
  result.lambda = sum_gm / sum_mm;
  result.fitted_from = trials;

  double sq = 0.0;
  for (const DropTrial& t : trials) {
    const double residual = t.known_g - result.lambda * t.raw.magnitude();
    sq += residual * residual;
  }
  result.residual_rms = std::sqrt(sq / static_cast<double>(trials.size()));
  return result;
}

ImpactClass classify_impact(double v_g, double high_threshold_g) {
  return v_g >= high_threshold_g ? ImpactClass::kHigh : ImpactClass::kLow;
}

std::string assign_leg(EpochMs ts, std::span<const LegDef> legs) {
  EpochMs span_end = std::numeric_limits<EpochMs>::min();
  for (const LegDef& leg : legs) span_end = std::max(span_end, leg.to_ts);

  const LegDef* found = nullptr;
  for (const LegDef& leg : legs) {
    const bool inside =
        ts >= leg.from_ts && (ts < leg.to_ts || (leg.to_ts == span_end && ts == leg.to_ts));
    if (!inside) continue;
    if (found) {
      throw ValidationError("legs", "legs '" + found->label + "' and '" + leg.label +
                                        "' overlap at ts " + std::to_string(ts));
    }
    found = &leg;
  }
  return found ? found->label : kUnknownLegLabel;
}

AggregateResult aggregate(std::span<const StoredRecord> records, std::span<const LegDef> legs,
                          double lambda, double high_threshold_g) {
  AggregateResult result;
  result.impacts.reserve(records.size());

  result.stats.reserve(legs.size() + 1);
  std::map<std::string, std::size_t> stat_index;
  for (const LegDef& leg : legs) {
    LegStats stats;
    stats.leg_label = leg.label;
    stats.kind = leg.kind;
    stat_index[leg.label] = result.stats.size();
    result.stats.push_back(std::move(stats));
  }
  LegStats unknown;
  unknown.leg_label = kUnknownLegLabel;
  result.stats.push_back(std::move(unknown));
  const std::size_t unknown_index = result.stats.size() - 1;

  std::vector<double> sums(result.stats.size(), 0.0);

  for (const StoredRecord& record : records) {
    CalibratedImpact impact;
    impact.ts = record.ts;
    impact.v_g = raw_to_gforce(record.accel(), lambda);
    impact.klass = classify_impact(impact.v_g, high_threshold_g);
    impact.leg_label = assign_leg(record.ts, legs);
    impact.lat = record.lat;
    impact.lon = record.lon;

    const auto it = stat_index.find(impact.leg_label);
    const std::size_t index = it != stat_index.end() ? it->second : unknown_index;

    LegStats& stats = result.stats[index];
    ++stats.n_total;
    if (impact.klass == ImpactClass::kHigh) {
      ++stats.n_high;
    } else {
      ++stats.n_low;
    }
    stats.max_g = std::max(stats.max_g, impact.v_g);
    sums[index] += impact.v_g;

    result.impacts.push_back(std::move(impact));
  }

  for (std::size_t i = 0; i < result.stats.size(); ++i) {
    if (result.stats[i].n_total > 0) {
      result.stats[i].mean_g = sums[i] / static_cast<double>(result.stats[i].n_total);
    }
  }
  return result;
}

std::vector<DropTrial> parse_drop_trials_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<DropTrial> trials;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "known_g,x,y,z") {
        csv_error(origin, line_no, "expected header \"known_g,x,y,z\", got \"" + line + "\"");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      csv_error(origin, line_no,
                "expected 4 fields, got " + std::to_string(fields.size()));
    }
    DropTrial trial;
    trial.known_g = parse_double_field(fields[0], origin, line_no, "known_g");
    trial.raw.x = parse_int_field(fields[1], origin, line_no, "x");
    trial.raw.y = parse_int_field(fields[2], origin, line_no, "y");
    trial.raw.z = parse_int_field(fields[3], origin, line_no, "z");
    trials.push_back(trial);
  }
  if (!saw_header) csv_error(origin, 1, "missing header \"known_g,x,y,z\"");
  return trials;
}

std::vector<DropTrial> load_drop_trials_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_drop_trials_csv(buf.str(), path);
}

}  // namespace cargotrack
