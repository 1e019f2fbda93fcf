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

#include <cmath>
#include <string>

#include "cargotrack/errors.hpp"
#include "cargotrack/scenario.hpp"
#include "cargotrack/time_util.hpp"
#include "doctest.h"

using namespace cargotrack;

namespace {

const std::string kScenarioDir = CARGOTRACK_SCENARIO_DIR;

// A minimal valid scenario: 100 s journey, one leg, no noise, no shocks.
Scenario tiny_scenario() {
  Scenario sc;
  sc.name = "tiny";
  sc.start_ts = 1000000;
  sc.waypoints = {{1000000, 10.0, 20.0}, {1100000, 11.0, 21.0}};
  sc.legs = {{"only", LegKind::kLand, 1000000, 1100000, DisplayColor::kRed}};
  return sc;
}

}  // namespace

TEST_CASE("demo_voyage fixture loads with three legs LAND/SEA/LAND") {
  const Scenario sc = load_scenario(kScenarioDir + "/demo_voyage.json");
  CHECK(sc.name == "demo_voyage");
  CHECK(sc.device_id == "ct-demo-001");
  REQUIRE(sc.legs.size() == 3);
  CHECK(sc.legs[0].kind == LegKind::kLand);
  CHECK(sc.legs[1].kind == LegKind::kSea);
  CHECK(sc.legs[2].kind == LegKind::kLand);
  CHECK(sc.legs[0].display_color == DisplayColor::kRed);
  CHECK(sc.legs[1].display_color == DisplayColor::kBlue);
  CHECK(sc.legs[2].display_color == DisplayColor::kGreen);
  CHECK(sc.start_ts == 1634544000000);
  CHECK(sc.span_end() == 1634565600000);
  REQUIRE(sc.device_config.has_value());
  CHECK(sc.device_config->flush_interval_s == 1800);
  CHECK(sc.shocks.size() == 13);
  CHECK_NOTHROW(sc.validate());
}

TEST_CASE("validation: overlapping legs are named in the error") {
  Scenario sc = tiny_scenario();
  sc.legs = {{"first", LegKind::kLand, 1000000, 1060000, DisplayColor::kRed},
             {"second", LegKind::kSea, 1050000, 1100000, DisplayColor::kBlue}};
  try {
    sc.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("first") != std::string::npos);
    CHECK(msg.find("second") != std::string::npos);
  }
}

TEST_CASE("validation: structural errors") {
  Scenario sc = tiny_scenario();
  sc.waypoints.clear();
  CHECK_THROWS_AS(sc.validate(), ValidationError);

  sc = tiny_scenario();
  sc.waypoints[1].ts = sc.waypoints[0].ts;  // not strictly increasing
  CHECK_THROWS_AS(sc.validate(), ValidationError);

  sc = tiny_scenario();
  sc.legs = {{"gap-a", LegKind::kLand, 1000000, 1040000, DisplayColor::kRed},
             {"gap-b", LegKind::kLand, 1060000, 1100000, DisplayColor::kGreen}};
  CHECK_THROWS_AS(sc.validate(), ValidationError);  // legs must partition the span

  sc = tiny_scenario();
  sc.shocks = {{2000000, 5.0, {1, 0, 0}, 50.0}};  // outside the journey span
  CHECK_THROWS_AS(sc.validate(), ValidationError);

  sc = tiny_scenario();
  sc.shocks = {{1050000, 5.0, {1, 1, 0}, 50.0}};  // |axis| != 1
  CHECK_THROWS_AS(sc.validate(), ValidationError);

  sc = tiny_scenario();
  sc.shocks = {{1050000, -5.0, {1, 0, 0}, 50.0}};  // peak must be positive
  CHECK_THROWS_AS(sc.validate(), ValidationError);

  sc = tiny_scenario();
  sc.ambient_g_rms = -0.1;
  CHECK_THROWS_AS(sc.validate(), ValidationError);
}

TEST_CASE("true_acceleration_at: gravity only when quiet") {
  Scenario sc = tiny_scenario();
  NoiseRng rng(1);
  const Vec3 a = true_acceleration_at(sc, 1050000, rng);
  CHECK(a == Vec3{0.0, -1.0, 0.0});
}

TEST_CASE("true_acceleration_at: half-sine peak adds exactly peak_g") {
  Scenario sc = tiny_scenario();
  sc.shocks = {{1050000, 8.0, {1, 0, 0}, 100.0}};
  NoiseRng rng(1);
  // Center of the pulse: sin(pi * 50/100) = 1.
  const Vec3 at_peak = true_acceleration_at(sc, 1050050, rng);
  CHECK(at_peak.x == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(at_peak.y == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(at_peak.z == 0.0);
  // Pulse edges contribute zero.
  const Vec3 at_start = true_acceleration_at(sc, 1050000, rng);
  CHECK(at_start.x == doctest::Approx(0.0).epsilon(1e-12));
  // Outside the window: gravity alone.
  const Vec3 after = true_acceleration_at(sc, 1050200, rng);
  CHECK(after == Vec3{0.0, -1.0, 0.0});
}

TEST_CASE("true_acceleration_at rejects out-of-span timestamps") {
  Scenario sc = tiny_scenario();
  NoiseRng rng(1);
  CHECK_THROWS_AS(true_acceleration_at(sc, 999999, rng), std::out_of_range);
  CHECK_THROWS_AS(true_acceleration_at(sc, 1100001, rng), std::out_of_range);
  CHECK_NOTHROW(true_acceleration_at(sc, 1000000, rng));
  CHECK_NOTHROW(true_acceleration_at(sc, 1100000, rng));
}

TEST_CASE("ambient noise consumes exactly three variates per sample, in x,y,z order") {
  Scenario sc = tiny_scenario();
  sc.ambient_g_rms = 0.05;

  NoiseRng used(77);
  const Vec3 a = true_acceleration_at(sc, 1050000, used);

  NoiseRng fresh(77);
  const double nx = fresh.gaussian();
  const double ny = fresh.gaussian();
  const double nz = fresh.gaussian();
  CHECK(a.x == 0.05 * nx);
  CHECK(a.y == -1.0 + 0.05 * ny);
  CHECK(a.z == 0.05 * nz);

  // And the streams stay aligned afterwards.
  CHECK(used.gaussian() == fresh.gaussian());
}

TEST_CASE("zero ambient consumes no randomness at all") {
  Scenario sc = tiny_scenario();
  NoiseRng used(123);
  (void)true_acceleration_at(sc, 1050000, used);
  NoiseRng fresh(123);
  CHECK(used.gaussian() == fresh.gaussian());
}

TEST_CASE("sampled ambient RMS matches the configured amplitude") {
  Scenario sc = tiny_scenario();
  sc.ambient_g_rms = 0.05;
  NoiseRng rng(2026);
  double sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec3 a = true_acceleration_at(sc, 1050000, rng);
    // Noise is what remains after removing gravity.
    sum_sq += a.x * a.x + (a.y + 1.0) * (a.y + 1.0) + a.z * a.z;
  }
  const double rms = std::sqrt(sum_sq / (3.0 * n));
  CHECK(rms == doctest::Approx(0.05).epsilon(0.10));
}

TEST_CASE("NoiseRng is seed-deterministic with unit-variance output") {
  NoiseRng a(5), b(5), c(6);
  bool all_equal = true;
  bool any_diff_seed_diff = false;
  double sum = 0.0, sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double va = a.gaussian();
    const double vb = b.gaussian();
    const double vc = c.gaussian();
    all_equal = all_equal && va == vb;
    any_diff_seed_diff = any_diff_seed_diff || va != vc;
    CHECK(std::abs(va) <= 6.0);  // sum of 12 uniforms minus 6 is bounded
    sum += va;
    sum_sq += va * va;
  }
  CHECK(all_equal);
  CHECK(any_diff_seed_diff);
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("coverage_at: union over containing regions") {
  Scenario sc = tiny_scenario();
  sc.coverage = {{1000000, 1050000, {.two_g = true}},
                 {1040000, 1080000, {.three_g = true}}};
  CHECK(coverage_at(sc, 1020000) == NetworkSet{.three_g = false, .two_g = true});
  CHECK(coverage_at(sc, 1045000) == NetworkSet{.three_g = true, .two_g = true});
  CHECK(coverage_at(sc, 1060000) == NetworkSet{.three_g = true, .two_g = false});
  CHECK(coverage_at(sc, 1090000).empty());
  // Regions are half-open: the end instant is outside.
  CHECK(coverage_at(sc, 1050000) == NetworkSet{.three_g = true, .two_g = false});
  CHECK(coverage_at(sc, 1080000).empty());
}

TEST_CASE("demo_voyage goes dark mid-ocean") {
  const Scenario sc = load_scenario(kScenarioDir + "/demo_voyage.json");
  // 11:00 UTC sits in the scheduled coverage gap.
  CHECK(coverage_at(sc, parse_timestamp("2021-10-18T11:00:00Z")).empty());
  CHECK_FALSE(coverage_at(sc, parse_timestamp("2021-10-18T08:30:00Z")).empty());
  CHECK_FALSE(coverage_at(sc, parse_timestamp("2021-10-18T12:20:00Z")).empty());
}

TEST_CASE("position_at interpolates waypoints and clamps at the ends") {
  const Scenario sc = load_scenario(kScenarioDir + "/demo_voyage.json");
  const auto at_start = position_at(sc, sc.start_ts);
  CHECK(at_start.first == doctest::Approx(19.0760));
  CHECK(at_start.second == doctest::Approx(72.8777));

  const auto at_waypoint = position_at(sc, parse_timestamp("2021-10-18T10:00:00Z"));
  CHECK(at_waypoint.first == doctest::Approx(18.95));
  CHECK(at_waypoint.second == doctest::Approx(72.84));

  const auto midpoint = position_at(sc, parse_timestamp("2021-10-18T09:00:00Z"));
  CHECK(midpoint.first == doctest::Approx((19.0760 + 18.95) / 2));
  CHECK(midpoint.second == doctest::Approx((72.8777 + 72.84) / 2));

  // Clamped outside the span.
  CHECK(position_at(sc, sc.start_ts - 10000) == position_at(sc, sc.start_ts));
  CHECK(position_at(sc, sc.span_end() + 10000) == position_at(sc, sc.span_end()));
}

TEST_CASE("parse_scenario_json diagnostics carry the origin") {
  CHECK_THROWS_AS(parse_scenario_json("{not json", "inline"), ParseError);
  try {
    parse_scenario_json("{not json", "inline");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("inline") != std::string::npos);
  }
  // Structurally valid JSON with a missing required member.
  CHECK_THROWS_AS(parse_scenario_json(R"({"name":"x"})", "inline"), Error);
}

TEST_CASE("load_scenario reports missing files") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/path/voyage.json"), Error);
}

TEST_CASE("parse_legs_json accepts all three document shapes") {
  const std::string bare = R"([
    {"label":"a","kind":"LAND","from_ts":0,"to_ts":100,"display_color":"RED"},
    {"label":"b","kind":"SEA","from_ts":100,"to_ts":200,"display_color":"BLUE"}
  ])";
  const std::string wrapped = R"({"legs":)" + bare + "}";

  const auto from_bare = parse_legs_json(bare, "t");
  const auto from_wrapped = parse_legs_json(wrapped, "t");
  CHECK(from_bare == from_wrapped);
  REQUIRE(from_bare.size() == 2);
  CHECK(from_bare[0].label == "a");
  CHECK(from_bare[1].kind == LegKind::kSea);

  // A whole scenario document also works.
  const auto from_scenario = load_legs(kScenarioDir + "/demo_voyage.json");
  REQUIRE(from_scenario.size() == 3);
  CHECK(from_scenario[0].label == "inland-haul");
}

TEST_CASE("parse_legs_json rejects duplicates and overlaps") {
  CHECK_THROWS_AS(parse_legs_json(R"([
    {"label":"a","kind":"LAND","from_ts":0,"to_ts":100},
    {"label":"a","kind":"SEA","from_ts":100,"to_ts":200}
  ])", "t"), ValidationError);

  CHECK_THROWS_AS(parse_legs_json(R"([
    {"label":"a","kind":"LAND","from_ts":0,"to_ts":150},
    {"label":"b","kind":"SEA","from_ts":100,"to_ts":200}
  ])", "t"), ValidationError);

  CHECK_THROWS_AS(parse_legs_json(R"([
    {"label":"a","kind":"LAND","from_ts":100,"to_ts":100}
  ])", "t"), ValidationError);  // empty interval
}

TEST_CASE("parse_device_config_json fills defaults and validates") {
  const DeviceConfig defaults = parse_device_config_json("{}", "t");
  CHECK(defaults.capture_threshold_counts == 64);
  CHECK(defaults.sample_rate_hz == 100);
  CHECK(defaults.buffer_capacity == 4096);
  CHECK(defaults.flush_interval_s == 86400);

  const DeviceConfig custom = parse_device_config_json(
      R"({"capture_threshold_counts":32,"flush_interval_s":600,
          "network_preference":["TWO_G"]})", "t");
  CHECK(custom.capture_threshold_counts == 32);
  CHECK(custom.flush_interval_s == 600);
  REQUIRE(custom.network_preference.size() == 1);
  CHECK(custom.network_preference[0] == NetworkKind::kTwoG);

  CHECK_THROWS_AS(parse_device_config_json(R"({"sample_rate_hz":-5})", "t"), Error);
  CHECK_THROWS_AS(parse_device_config_json(R"({"network_preference":["LTE"]})", "t"), Error);
}
