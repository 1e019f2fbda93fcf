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

#include "cargotrack/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "cargotrack/errors.hpp"
#include "cargotrack/time_util.hpp"

namespace cargotrack {

namespace {

// Plot area inside the 1200x400 canvas.
constexpr double kCanvasW = 1200.0;
constexpr double kCanvasH = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 1180.0;
constexpr double kTop = 48.0;
constexpr double kBottom = 360.0;
constexpr double kBarWidth = 2.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

const char* display_color_hex(DisplayColor color) {
  switch (color) {
    case DisplayColor::kRed: return "#d62728";
    case DisplayColor::kBlue: return "#1f77b4";
    case DisplayColor::kGreen: return "#2ca02c";
    case DisplayColor::kOther: return "#7f7f7f";
  }
  return "#7f7f7f";
}

void ReportSpec::validate() const {
  if (from_ts >= to_ts) throw ValidationError("to_ts", "report time range must be non-empty");
  if (!(high_threshold_g > 0.0)) {
    throw ValidationError("high_threshold_g", "must be positive");
  }
}

std::string render_impact_plot(std::span<const CalibratedImpact> impacts,
                               std::span<const LegDef> legs, const ReportSpec& spec) {
  spec.validate();
  for (std::size_t i = 1; i < impacts.size(); ++i) {
    if (impacts[i].ts < impacts[i - 1].ts) {
      throw ValidationError("impacts", "must be sorted by ts");
    }
  }

  double max_g = spec.high_threshold_g;
  for (const CalibratedImpact& impact : impacts) max_g = std::max(max_g, impact.v_g);
  const double y_max = 1.1 * max_g;

  const double span_ms = static_cast<double>(spec.to_ts - spec.from_ts);
  const auto x_of = [&](EpochMs ts) {
    const double f = static_cast<double>(ts - spec.from_ts) / span_ms;
    return std::clamp(kLeft + f * (kRight - kLeft), kLeft, kRight);
  };
  const auto y_of = [&](double g) { return kBottom - g / y_max * (kBottom - kTop); };

  std::map<std::string, DisplayColor> leg_colors;
  for (const LegDef& leg : legs) leg_colors[leg.label] = leg.display_color;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(kCanvasW) + " " +
         fmt(kCanvasH) + "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kCanvasW) + "\" height=\"" + fmt(kCanvasH) +
         "\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + fmt(kLeft) + "\" y=\"22\" font-size=\"16\" fill=\"#202020\">" +
         xml_escape(spec.title) + "</text>\n";
  svg += "<text x=\"" + fmt(kRight) + "\" y=\"22\" font-size=\"12\" fill=\"#606060\" "
         "text-anchor=\"end\">device " + xml_escape(spec.device_id) + "</text>\n";

  // Leg bands: boundary rules plus a label per leg in its color.
  for (const LegDef& leg : legs) {
    const double x0 = x_of(std::max(leg.from_ts, spec.from_ts));
    const double x1 = x_of(std::min(leg.to_ts, spec.to_ts));
    if (x1 <= x0) continue;
    svg += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(x0) + "\" y2=\"" +
           fmt(kBottom) + "\" stroke=\"#d0d0d0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt((x0 + x1) / 2.0) + "\" y=\"" + fmt(kTop - 6.0) +
           "\" font-size=\"12\" text-anchor=\"middle\" fill=\"" +
           display_color_hex(leg.display_color) + "\">" + xml_escape(leg.label) + "</text>\n";
  }
  svg += "<line x1=\"" + fmt(kRight) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kRight) +
         "\" y2=\"" + fmt(kBottom) + "\" stroke=\"#d0d0d0\" stroke-width=\"1\"/>\n";

  // One bar per impact, colored by its leg.
  for (const CalibratedImpact& impact : impacts) {
    const auto it = leg_colors.find(impact.leg_label);
    const DisplayColor color = it != leg_colors.end() ? it->second : DisplayColor::kOther;
    const double x = x_of(impact.ts);
    const double y = y_of(std::min(impact.v_g, y_max));
    svg += "<rect x=\"" + fmt(x - kBarWidth / 2.0) + "\" y=\"" + fmt(y) + "\" width=\"" +
           fmt(kBarWidth) + "\" height=\"" + fmt(kBottom - y) + "\" fill=\"" +
           display_color_hex(color) + "\"/>\n";
  }

  // Threshold rule.
  const double ty = y_of(spec.high_threshold_g);
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(ty) + "\" x2=\"" + fmt(kRight) +
         "\" y2=\"" + fmt(ty) +
         "\" stroke=\"#b03030\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
  svg += "<text x=\"" + fmt(kRight - 4.0) + "\" y=\"" + fmt(ty - 4.0) +
         "\" font-size=\"11\" text-anchor=\"end\" fill=\"#b03030\">" +
         fmt_sig(spec.high_threshold_g) + " g</text>\n";

  // Axes with ticks.
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
         "\" y2=\"" + fmt(kBottom) + "\" stroke=\"#202020\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" + fmt(kRight) +
         "\" y2=\"" + fmt(kBottom) + "\" stroke=\"#202020\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double g = y_max * i / 4.0;
    const double y = y_of(g);
    svg += "<line x1=\"" + fmt(kLeft - 4.0) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft) +
           "\" y2=\"" + fmt(y) + "\" stroke=\"#202020\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(kLeft - 8.0) + "\" y=\"" + fmt(y + 4.0) +
           "\" font-size=\"11\" text-anchor=\"end\" fill=\"#202020\">" + fmt_sig(g) +
           "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const EpochMs ts = spec.from_ts + (spec.to_ts - spec.from_ts) * i / 4;
    const double x = x_of(ts);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
           fmt(kBottom + 4.0) + "\" stroke=\"#202020\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kBottom + 18.0) +
           "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#202020\">" +
           format_utc_minutes(ts) + "</text>\n";
  }
  svg += "<text x=\"14\" y=\"" + fmt((kTop + kBottom) / 2.0) +
         "\" font-size=\"12\" fill=\"#202020\" transform=\"rotate(-90 14 " +
         fmt((kTop + kBottom) / 2.0) + ")\" text-anchor=\"middle\">impact [g]</text>\n";

  svg += "</svg>\n";
  return svg;
}

std::string leg_stats_csv(std::span<const LegStats> stats) {
  std::string csv = "leg,kind,n_total,n_high,n_low,max_g,mean_g\n";
  for (const LegStats& s : stats) {
    csv += s.leg_label;
    csv += ',';
    if (s.kind) csv += to_string(*s.kind);
    csv += ',' + std::to_string(s.n_total);
    csv += ',' + std::to_string(s.n_high);
    csv += ',' + std::to_string(s.n_low);
    csv += ',' + fmt_sig(s.max_g);
    csv += ',' + fmt_sig(s.mean_g);
    csv += '\n';
  }
  return csv;
}

void export_leg_csv(std::span<const LegStats> stats, const std::string& path) {
  write_text_file(path, leg_stats_csv(stats));
}

std::string impacts_csv(std::span<const CalibratedImpact> impacts) {
  std::string csv = "ts,v_g,class,leg,lat,lon\n";
  for (const CalibratedImpact& impact : impacts) {
    csv += std::to_string(impact.ts);
    csv += ',' + fmt_sig(impact.v_g);
    csv += ',';
    csv += to_string(impact.klass);
    csv += ',' + impact.leg_label;
    csv += ',' + fmt_sig(impact.lat);
    csv += ',' + fmt_sig(impact.lon);
    csv += '\n';
  }
  return csv;
}

std::string battery_report_csv(const JourneyLog& journey) {
  std::string csv = "flush_ts,battery_pct,records_sent\n";
  for (const FlushEvent& e : journey.flush_events) {
    csv += std::to_string(e.ts);
    csv += ',' + fmt_sig(e.battery_pct);
    csv += ',' + std::to_string(e.records_sent);
    csv += '\n';
  }
  const double days =
      static_cast<double>(journey.end_ts - journey.start_ts) / (86400.0 * 1000.0);
  csv += "summary," + fmt_sig(days) + ',' + fmt_sig(journey.final_battery_pct) + '\n';
  return csv;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(path + ": write failed");
}

}  // namespace cargotrack
