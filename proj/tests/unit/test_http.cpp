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

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "cargotrack/ingest.hpp"
#include "cargotrack/ingest_http.hpp"
#include "cargotrack/wire.hpp"
#include "doctest.h"

using namespace cargotrack;
using nlohmann::json;

namespace {

constexpr const char* kKey = "test-key";

struct ServerFixture {
  IngestService service{RecordStore{}, {kKey}};
  IngestHttpServer server{service};
  std::thread runner;

  ServerFixture() {
    REQUIRE(server.bind("127.0.0.1", 0));
    REQUIRE(server.port() > 0);
    runner = std::thread([this] { server.serve(); });
    server.wait_until_ready();
  }

  ~ServerFixture() {
    server.stop();
    runner.join();
  }

  httplib::Client client() { return httplib::Client("127.0.0.1", server.port()); }

  static httplib::Headers auth(const std::string& key = kKey) {
    return {{"X-Api-Key", key}};
  }
};

UplinkBatch demo_batch(std::uint64_t seq, EpochMs first_ts, int n = 2,
                       const std::string& device_id = "dev") {
  UplinkBatch b;
  b.device_id = device_id;
  b.seq = seq;
  b.battery_pct = 88.0;
  for (int i = 0; i < n; ++i) {
    SensorRecord r;
    r.ts = first_ts + 10 * i;
    r.battery_pct = 88.0;
    r.accel = {100 + i, -50, 300};
    r.lat = 19.0;
    r.lon = 72.8;
    b.records.push_back(r);
  }
  b.flush_ts = b.records.back().ts + 5;
  return b;
}

}  // namespace

TEST_CASE("health endpoint needs no key and reports the record count") {
  ServerFixture fx;
  auto cli = fx.client();

  auto res = cli.Get("/v1/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  const json body = json::parse(res->body);
  CHECK(body.at("status") == "ok");
  CHECK(body.at("records") == 0);

  fx.service.ingest_batch(demo_batch(0, 1000), kKey);
  res = cli.Get("/v1/health");
  REQUIRE(res);
  CHECK(json::parse(res->body).at("records") == 2);
}

TEST_CASE("batch POST round trip: accepted, then duplicate, both acked with 200") {
  ServerFixture fx;
  auto cli = fx.client();
  const std::string wire = serialize_batch(demo_batch(5, 2000, 3));

  auto res = cli.Post("/v1/batches", ServerFixture::auth(), wire, "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  json body = json::parse(res->body);
  CHECK(body.at("status") == "accepted");
  CHECK(body.at("records_stored") == 3);
  CHECK(fx.service.store_size() == 3);

  res = cli.Post("/v1/batches", ServerFixture::auth(), wire, "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  body = json::parse(res->body);
  CHECK(body.at("status") == "duplicate");
  CHECK(body.at("records_stored") == 0);
  CHECK(fx.service.store_size() == 3);
}

TEST_CASE("bad or missing key yields 401 on every authenticated route") {
  ServerFixture fx;
  auto cli = fx.client();
  const std::string wire = serialize_batch(demo_batch(0, 1000));

  auto res = cli.Post("/v1/batches", ServerFixture::auth("wrong"), wire, "application/json");
  REQUIRE(res);
  CHECK(res->status == 401);
  CHECK(json::parse(res->body).at("status") == "unauthorized");

  res = cli.Post("/v1/batches", wire, "application/json");  // no header at all
  REQUIRE(res);
  CHECK(res->status == 401);
  CHECK(fx.service.store_size() == 0);

  res = cli.Get("/v1/records?device_id=dev", ServerFixture::auth("wrong"));
  REQUIRE(res);
  CHECK(res->status == 401);

  res = cli.Get("/v1/devices");
  REQUIRE(res);
  CHECK(res->status == 401);
}

TEST_CASE("malformed bodies and unsorted records yield 400 with a reason") {
  ServerFixture fx;
  auto cli = fx.client();

  auto res = cli.Post("/v1/batches", ServerFixture::auth(), "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).at("status") == "malformed");

  UplinkBatch unsorted = demo_batch(0, 1000);
  unsorted.records[1].ts = unsorted.records[0].ts - 1;
  res = cli.Post("/v1/batches", ServerFixture::auth(), serialize_batch(unsorted),
                 "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  const json body = json::parse(res->body);
  CHECK(body.at("status") == "malformed");
  CHECK(body.at("detail") == "records[1].ts: record timestamps must be strictly increasing");
  CHECK(fx.service.store_size() == 0);
}

TEST_CASE("record queries honor inclusive bounds and both timestamp syntaxes") {
  ServerFixture fx;
  fx.service.ingest_batch(demo_batch(0, 100, 3), kKey);  // ts 100, 110, 120
  auto cli = fx.client();

  auto res = cli.Get("/v1/records?device_id=dev&from=100&to=120", ServerFixture::auth());
  REQUIRE(res);
  REQUIRE(res->status == 200);
  json body = json::parse(res->body);
  CHECK(body.at("device_id") == "dev");
  CHECK(body.at("count") == 3);
  CHECK(body.at("records").size() == 3);
  CHECK(body.at("records")[0].at("ts") == 100);
  CHECK(body.at("records")[2].at("ts") == 120);

  res = cli.Get("/v1/records?device_id=dev&from=101&to=119", ServerFixture::auth());
  REQUIRE(res);
  CHECK(json::parse(res->body).at("count") == 1);

  // RFC 3339 timestamps work too: 110 ms after the epoch.
  res = cli.Get("/v1/records?device_id=dev&from=1970-01-01T00:00:00.110Z&to=120",
                ServerFixture::auth());
  REQUIRE(res);
  REQUIRE(res->status == 200);
  CHECK(json::parse(res->body).at("count") == 2);

  // No bounds: everything for the device.
  res = cli.Get("/v1/records?device_id=dev", ServerFixture::auth());
  REQUIRE(res);
  CHECK(json::parse(res->body).at("count") == 3);

  // Unknown device is an empty success.
  res = cli.Get("/v1/records?device_id=ghost", ServerFixture::auth());
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("count") == 0);
}

TEST_CASE("record query parameter errors map to 400") {
  ServerFixture fx;
  auto cli = fx.client();

  auto res = cli.Get("/v1/records", ServerFixture::auth());
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).at("detail") == "missing device_id parameter");

  res = cli.Get("/v1/records?device_id=dev&from=yesterday", ServerFixture::auth());
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).at("status") == "malformed");

  res = cli.Get("/v1/records?device_id=dev&from=200&to=100", ServerFixture::auth());
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).at("status") == "bad_range");
}

TEST_CASE("devices endpoint lists ingested devices in order") {
  ServerFixture fx;
  fx.service.ingest_batch(demo_batch(0, 100, 1, "zulu"), kKey);
  fx.service.ingest_batch(demo_batch(0, 100, 1, "alpha"), kKey);
  auto cli = fx.client();

  auto res = cli.Get("/v1/devices", ServerFixture::auth());
  REQUIRE(res);
  REQUIRE(res->status == 200);
  const json body = json::parse(res->body);
  CHECK(body.at("devices") == json::array({"alpha", "zulu"}));
}

TEST_CASE("concurrent posts never expose a partially ingested batch") {
  ServerFixture fx;
  constexpr int kThreads = 4;
  constexpr int kBatches = 25;
  constexpr int kRecordsPerBatch = 20;

  // doctest REQUIRE throws, which must stay on the main thread; the writers
  // only CHECK and report completion through the counter.
  std::atomic<int> completed{0};
  std::vector<std::thread> writers;
  for (int t = 0; t < kThreads; ++t) {
    writers.emplace_back([&fx, &completed, t] {
      auto cli = fx.client();
      const std::string device = "dev-" + std::to_string(t);
      for (int i = 0; i < kBatches; ++i) {
        const auto batch = demo_batch(static_cast<std::uint64_t>(i),
                                      1000 + 1000L * i, kRecordsPerBatch, device);
        auto res = cli.Post("/v1/batches", ServerFixture::auth(), serialize_batch(batch),
                            "application/json");
        CHECK(res);
        if (res) CHECK(res->status == 200);
      }
      ++completed;
    });
  }

  // While the writers hammer the server, every observed per-device count
  // must be a whole number of batches: queries serialize against ingests.
  auto cli = fx.client();
  int observations = 0;
  bool finished = false;
  while (!finished) {
    finished = completed.load() == kThreads;  // one last pass after they stop
    for (int t = 0; t < kThreads; ++t) {
      auto res = cli.Get("/v1/records?device_id=dev-" + std::to_string(t),
                         ServerFixture::auth());
      REQUIRE(res);
      REQUIRE(res->status == 200);
      const json body = json::parse(res->body);
      const int count = body.at("count").get<int>();
      CHECK(count % kRecordsPerBatch == 0);
      ++observations;
    }
  }
  CHECK(observations >= kThreads);

  for (auto& w : writers) w.join();
  CHECK(fx.service.store_size() ==
        static_cast<std::size_t>(kThreads) * kBatches * kRecordsPerBatch);
}
