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

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cargotrack/analytics.hpp"
#include "cargotrack/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cargotrack;
using cargotrack::test::TempDir;
using cargotrack::test::spit;

namespace {

std::vector<LegDef> three_legs() {
  return {
      {"TRUCK-A", LegKind::kLand, 0, 100, DisplayColor::kRed},
      {"SHIP", LegKind::kSea, 100, 200, DisplayColor::kBlue},
      {"TRUCK-B", LegKind::kLand, 200, 300, DisplayColor::kGreen},
  };
}

StoredRecord record_at(EpochMs ts, int x, int y, int z) {
  StoredRecord r;
  r.device_id = "dev";
  r.seq = 0;
  r.ts = ts;
  r.battery_pct = 90.0;
  r.x = x;
  r.y = y;
  r.z = z;
  r.lat = 19.07;
  r.lon = 72.88;
  return r;
}

}  // namespace

TEST_CASE("raw_to_gforce matches hand-computed examples") {
  // 32 counts per g and a one-g reading straight down an axis.
  CHECK(raw_to_gforce({0, 0, 32}, 0.03125) == 1.0);
  CHECK(raw_to_gforce({0, -32, 0}, 0.03125) == 1.0);
  // 3-4-5 triangle in the x-y plane.
  CHECK(raw_to_gforce({3, 4, 0}, 1.0) == 5.0);
  CHECK(raw_to_gforce({1, 2, 2}, 0.5) == 1.5);
  CHECK(raw_to_gforce({0, 0, 0}, 0.03125) == 0.0);
}

TEST_CASE("raw_to_gforce rejects non-positive lambda") {
  CHECK_THROWS_AS(raw_to_gforce({1, 1, 1}, 0.0), std::domain_error);
  CHECK_THROWS_AS(raw_to_gforce({1, 1, 1}, -0.03), std::domain_error);
}

TEST_CASE("raw_to_gforce is homogeneous in lambda and symmetric in axes") {
  const RawTriple raw{17, -240, 99};
  CHECK(raw_to_gforce(raw, 0.06) == doctest::Approx(2.0 * raw_to_gforce(raw, 0.03)));

  // The magnitude ignores axis order and sign.
  const double base = raw_to_gforce({17, -240, 99}, 0.03125);
  CHECK(raw_to_gforce({-240, 99, 17}, 0.03125) == base);
  CHECK(raw_to_gforce({99, 17, 240}, 0.03125) == base);
  CHECK(raw_to_gforce({-17, 240, -99}, 0.03125) == base);
}

TEST_CASE("raw_to_gforce agrees with long-double arithmetic on random triples") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> count(-512, 512);
  std::uniform_real_distribution<double> lam(0.001, 0.1);
  for (int i = 0; i < 10000; ++i) {
    const RawTriple raw{count(rng), count(rng), count(rng)};
    const double lambda = lam(rng);
    const long double mag = std::sqrt(static_cast<long double>(raw.x) * raw.x +
                                      static_cast<long double>(raw.y) * raw.y +
                                      static_cast<long double>(raw.z) * raw.z);
    const double expected = static_cast<double>(static_cast<long double>(lambda) * mag);
    const double got = raw_to_gforce(raw, lambda);
    CHECK(std::abs(got - expected) <= 1e-12 * std::max(1.0, expected));
  }
}

TEST_CASE("single drop trial inverts directly") {
  // A 1 g reference drop reading 32 counts: lambda = 1/32 exactly.
  const CalibrationConstant c = calibrate_lambda({{1.0, {0, 0, 32}}});
  CHECK(c.lambda == 0.03125);
  CHECK(c.residual_rms == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.fitted_from.size() == 1);
}

TEST_CASE("noiseless trials recover the exact constant") {
  const double true_lambda = 0.03125;
  std::vector<DropTrial> trials;
  for (int m : {32, 64, 96, 160, 256, 480}) {
    trials.push_back({true_lambda * m, {0, 0, m}});
  }
  const CalibrationConstant c = calibrate_lambda(trials);
  CHECK(c.lambda == doctest::Approx(true_lambda).epsilon(1e-14));
  CHECK(c.residual_rms < 1e-12);
}

TEST_CASE("calibrate_lambda rejects degenerate inputs by name") {
  CHECK_THROWS_WITH_AS(calibrate_lambda({}), "trials: need at least one drop trial",
                       ValidationError);
  CHECK_THROWS_WITH_AS(calibrate_lambda({{1.0, {0, 0, 32}}, {2.0, {0, 0, 0}}}),
                       "trials[1].raw: raw magnitude must be positive", ValidationError);
  CHECK_THROWS_WITH_AS(calibrate_lambda({{0.0, {0, 0, 32}}}),
                       "trials[0].known_g: must be positive", ValidationError);
  CHECK_THROWS_WITH_AS(calibrate_lambda({{-3.0, {0, 0, 32}}}),
                       "trials[0].known_g: must be positive", ValidationError);
}

TEST_CASE("noisy fit minimizes squared error (grid oracle)") {
  const double true_lambda = 0.03;
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> noise(-0.02, 0.02);
  std::uniform_int_distribution<int> axis_counts(40, 500);

  std::vector<DropTrial> trials;
  for (int i = 0; i < 50; ++i) {
    const RawTriple raw{axis_counts(rng), axis_counts(rng) / 3, axis_counts(rng) / 7};
    const double m = raw.magnitude();
    trials.push_back({true_lambda * m * (1.0 + noise(rng)), raw});
  }

  const CalibrationConstant c = calibrate_lambda(trials);
  CHECK(c.lambda == doctest::Approx(true_lambda).epsilon(0.01));

  const auto sse = [&trials](double lambda) {
    long double acc = 0.0L;
    for (const DropTrial& t : trials) {
      const long double r = t.known_g - lambda * t.raw.magnitude();
      acc += r * r;
    }
    return static_cast<double>(acc);
  };

  // The least-squares optimum beats every nearby candidate.
  const double best = sse(c.lambda);
  for (double rel : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1}) {
    CHECK(best <= sse(c.lambda * (1.0 + rel)) + 1e-15);
    CHECK(best <= sse(c.lambda * (1.0 - rel)) + 1e-15);
  }

  // residual_rms is the RMS of the residuals at the fitted constant.
  CHECK(c.residual_rms ==
        doctest::Approx(std::sqrt(best / static_cast<double>(trials.size()))).epsilon(1e-12));
}

TEST_CASE("classification boundary is inclusive at the threshold") {
  CHECK(classify_impact(8.0, 8.0) == ImpactClass::kHigh);
  CHECK(classify_impact(std::nextafter(8.0, 0.0), 8.0) == ImpactClass::kLow);
  CHECK(classify_impact(std::nextafter(8.0, 9.0), 8.0) == ImpactClass::kHigh);
  CHECK(classify_impact(0.0, 8.0) == ImpactClass::kLow);
  CHECK(to_string(ImpactClass::kHigh) == "HIGH");
  CHECK(to_string(ImpactClass::kLow) == "LOW");
}

TEST_CASE("classification equals the plain comparator on random inputs") {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> level(0.0, 20.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = level(rng);
    const double t = level(rng);
    const ImpactClass expected = v >= t ? ImpactClass::kHigh : ImpactClass::kLow;
    CHECK(classify_impact(v, t) == expected);
    // Scaling by a power of two is exact, so the class cannot change.
    for (double k : {0.125, 0.5, 2.0, 16.0}) {
      CHECK(classify_impact(v * k, t * k) == expected);
    }
  }
}

TEST_CASE("leg assignment: half-open interior, inclusive final endpoint") {
  const auto legs = three_legs();
  CHECK(assign_leg(0, legs) == "TRUCK-A");
  CHECK(assign_leg(99, legs) == "TRUCK-A");
  CHECK(assign_leg(100, legs) == "SHIP");  // boundary belongs to the next leg
  CHECK(assign_leg(199, legs) == "SHIP");
  CHECK(assign_leg(200, legs) == "TRUCK-B");
  CHECK(assign_leg(299, legs) == "TRUCK-B");
  CHECK(assign_leg(300, legs) == "TRUCK-B");  // final to_ts is owned
  CHECK(assign_leg(301, legs) == kUnknownLegLabel);
  CHECK(assign_leg(-1, legs) == kUnknownLegLabel);
}

TEST_CASE("leg assignment: gaps are UNKNOWN, overlaps are an error") {
  const std::vector<LegDef> gappy = {
      {"A", LegKind::kLand, 0, 100, DisplayColor::kRed},
      {"C", LegKind::kLand, 200, 300, DisplayColor::kGreen},
  };
  CHECK(assign_leg(150, gappy) == kUnknownLegLabel);
  CHECK(assign_leg(100, gappy) == kUnknownLegLabel);  // A's half-open end
  CHECK(assign_leg(199, gappy) == kUnknownLegLabel);

  const std::vector<LegDef> overlapping = {
      {"A", LegKind::kLand, 0, 100, DisplayColor::kRed},
      {"B", LegKind::kSea, 50, 150, DisplayColor::kBlue},
  };
  CHECK_THROWS_WITH_AS(assign_leg(60, overlapping),
                       "legs: legs 'A' and 'B' overlap at ts 60", ValidationError);
  // Outside the overlap the ambiguity never materializes.
  CHECK(assign_leg(20, overlapping) == "A");
  CHECK(assign_leg(120, overlapping) == "B");

  CHECK(assign_leg(42, std::vector<LegDef>{}) == kUnknownLegLabel);
}

TEST_CASE("aggregate on empty input still lists every leg plus UNKNOWN") {
  const auto legs = three_legs();
  const AggregateResult result = aggregate({}, legs, 0.03125, 8.0);
  CHECK(result.impacts.empty());
  REQUIRE(result.stats.size() == 4);
  CHECK(result.stats[0].leg_label == "TRUCK-A");
  CHECK(result.stats[1].leg_label == "SHIP");
  CHECK(result.stats[2].leg_label == "TRUCK-B");
  CHECK(result.stats[3].leg_label == kUnknownLegLabel);
  CHECK_FALSE(result.stats[3].kind.has_value());
  for (const LegStats& s : result.stats) {
    CHECK(s.n_total == 0);
    CHECK(s.max_g == 0.0);
    CHECK(s.mean_g == 0.0);
  }
}

TEST_CASE("aggregate maps a single record through the whole pipeline") {
  const auto legs = three_legs();
  // 320 counts at 1/32 g per count: exactly 10 g, on the sea leg.
  const std::vector<StoredRecord> records = {record_at(150, 0, 0, 320)};
  const AggregateResult result = aggregate(records, legs, 0.03125, 8.0);

  REQUIRE(result.impacts.size() == 1);
  const CalibratedImpact& impact = result.impacts[0];
  CHECK(impact.ts == 150);
  CHECK(impact.v_g == 10.0);
  CHECK(impact.klass == ImpactClass::kHigh);
  CHECK(impact.leg_label == "SHIP");
  CHECK(impact.lat == 19.07);
  CHECK(impact.lon == 72.88);

  const LegStats& ship = result.stats[1];
  CHECK(ship.kind == LegKind::kSea);
  CHECK(ship.n_total == 1);
  CHECK(ship.n_high == 1);
  CHECK(ship.n_low == 0);
  CHECK(ship.max_g == 10.0);
  CHECK(ship.mean_g == 10.0);
  CHECK(result.stats[0].n_total == 0);
  CHECK(result.stats[2].n_total == 0);
  CHECK(result.stats[3].n_total == 0);
}

TEST_CASE("aggregate conserves counts and matches a brute-force recompute") {
  const auto legs = three_legs();
  const double lambda = 0.03125;
  const double threshold = 8.0;

  std::mt19937 rng(404);
  std::uniform_int_distribution<EpochMs> ts_dist(-50, 350);
  std::uniform_int_distribution<int> count(-512, 512);
  std::vector<StoredRecord> records;
  for (int i = 0; i < 500; ++i) {
    records.push_back(record_at(ts_dist(rng), count(rng), count(rng), count(rng)));
  }

  const AggregateResult result = aggregate(records, legs, lambda, threshold);
  REQUIRE(result.impacts.size() == records.size());

  // Input order is preserved.
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(result.impacts[i].ts == records[i].ts);
  }

  // Brute-force mirror with independent interval logic and arithmetic.
  struct Acc {
    std::size_t total = 0, high = 0, low = 0;
    double max_g = 0.0, sum = 0.0;
  };
  std::vector<Acc> acc(4);
  for (const StoredRecord& r : records) {
    std::size_t idx = 3;  // UNKNOWN
    if (r.ts >= 0 && r.ts < 100) idx = 0;
    else if (r.ts >= 100 && r.ts < 200) idx = 1;
    else if (r.ts >= 200 && r.ts <= 300) idx = 2;  // last leg owns its end
    const double v =
        lambda * std::sqrt(static_cast<double>(r.x) * r.x + static_cast<double>(r.y) * r.y +
                           static_cast<double>(r.z) * r.z);
    ++acc[idx].total;
    (v >= threshold ? acc[idx].high : acc[idx].low)++;
    acc[idx].max_g = std::max(acc[idx].max_g, v);
    acc[idx].sum += v;
  }

  std::size_t grand_total = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const LegStats& s = result.stats[i];
    CHECK(s.n_total == acc[i].total);
    CHECK(s.n_high == acc[i].high);
    CHECK(s.n_low == acc[i].low);
    CHECK(s.n_high + s.n_low == s.n_total);
    CHECK(s.max_g == doctest::Approx(acc[i].max_g).epsilon(1e-12));
    if (acc[i].total > 0) {
      CHECK(s.mean_g ==
            doctest::Approx(acc[i].sum / static_cast<double>(acc[i].total)).epsilon(1e-12));
      CHECK(s.mean_g <= s.max_g + 1e-12);
    }
    grand_total += s.n_total;
  }
  CHECK(grand_total == records.size());
}

TEST_CASE("drop-trial CSV parses, skipping blanks and tolerating CRLF") {
  const std::string text =
      "known_g,x,y,z\n"
      "1.0,0,0,32\n"
      "\n"
      "2.5,10,-20,60\r\n"
      "12.25,0,384,0\n";
  const auto trials = parse_drop_trials_csv(text, "mem");
  REQUIRE(trials.size() == 3);
  CHECK(trials[0].known_g == 1.0);
  CHECK(trials[0].raw == RawTriple{0, 0, 32});
  CHECK(trials[1].known_g == 2.5);
  CHECK(trials[1].raw == RawTriple{10, -20, 60});
  CHECK(trials[2].raw == RawTriple{0, 384, 0});

  // A header-only file is an empty trial list (calibrate rejects it later).
  CHECK(parse_drop_trials_csv("known_g,x,y,z\n", "mem").empty());
}

TEST_CASE("drop-trial CSV errors carry origin and line number") {
  CHECK_THROWS_WITH_AS(parse_drop_trials_csv("", "mem"),
                       "mem:1: missing header \"known_g,x,y,z\"", ParseError);
  CHECK_THROWS_WITH_AS(parse_drop_trials_csv("wrong,header\n1,2,3,4\n", "mem"),
                       "mem:1: expected header \"known_g,x,y,z\", got \"wrong,header\"",
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_drop_trials_csv("known_g,x,y,z\n1.0,0,0\n", "mem"),
                       "mem:2: expected 4 fields, got 3", ParseError);
  CHECK_THROWS_WITH_AS(parse_drop_trials_csv("known_g,x,y,z\n1.0,0,0,32\nbad,0,0,32\n", "mem"),
                       "mem:3: cannot parse known_g \"bad\"", ParseError);
  CHECK_THROWS_WITH_AS(parse_drop_trials_csv("known_g,x,y,z\n1.0,0,0.5,32\n", "mem"),
                       "mem:2: cannot parse y \"0.5\"", ParseError);
}

TEST_CASE("drop-trial CSV loads from disk and reports missing files") {
  TempDir dir;
  const auto path = dir.path() / "drops.csv";
  spit(path, "known_g,x,y,z\n1.0,0,0,32\n");
  const auto trials = load_drop_trials_csv(path.string());
  REQUIRE(trials.size() == 1);
  CHECK(trials[0].raw.z == 32);

  const auto missing = (dir.path() / "nope.csv").string();
  CHECK_THROWS_WITH_AS(load_drop_trials_csv(missing),
                       (missing + ": cannot open file").c_str(), ParseError);
}

TEST_CASE("calibration from CSV reproduces the worked 1-over-32 example") {
  // Five reference drops that all read exactly 32 counts per g.
  std::string text = "known_g,x,y,z\n";
  for (int g = 1; g <= 5; ++g) {
    text += std::to_string(g) + ".0,0,0," + std::to_string(32 * g) + "\n";
  }
  const CalibrationConstant c = calibrate_lambda(parse_drop_trials_csv(text, "mem"));
  CHECK(c.lambda == doctest::Approx(0.03125).epsilon(1e-14));
  CHECK(c.residual_rms < 1e-12);
}
