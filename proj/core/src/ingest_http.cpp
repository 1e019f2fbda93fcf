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

#include "cargotrack/ingest_http.hpp"

#include <limits>

#include <httplib.h>
#include <json.hpp>

#include "cargotrack/errors.hpp"
#include "cargotrack/ingest.hpp"
#include "cargotrack/time_util.hpp"

namespace cargotrack {

namespace {

using nlohmann::json;

constexpr const char* kApiKeyHeader = "X-Api-Key";

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json record_json(const StoredRecord& r) {
  json out{{"device_id", r.device_id},
           {"seq", r.seq},
           {"ts", r.ts},
           {"battery_pct", r.battery_pct},
           {"x", r.x},
           {"y", r.y},
           {"z", r.z},
           {"lat", r.lat},
           {"lon", r.lon}};
  if (r.temp_c) out["temp_c"] = *r.temp_c;
  if (r.hum_pct) out["hum_pct"] = *r.hum_pct;
  return out;
}

}  // namespace

struct IngestHttpServer::Impl {
  explicit Impl(IngestService& svc) : service(svc) {}

  IngestService& service;
  httplib::Server server;
  int port = 0;

  void install_routes();
};

void IngestHttpServer::Impl::install_routes() {
  server.Post("/v1/batches", [this](const httplib::Request& req, httplib::Response& res) {
    const IngestResult result =
        service.ingest_json(req.body, req.get_header_value(kApiKeyHeader));
    const json body{{"status", std::string(to_string(result.status))},
                    {"records_stored", result.records_stored},
                    {"detail", result.detail}};
    if (result.acked()) {
      reply(res, 200, body);
    } else if (result.status == IngestStatus::kUnauthorized) {
      reply(res, 401, body);
    } else {
      reply(res, 400, body);
    }
  });

  server.Get("/v1/records", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("device_id")) {
      reply(res, 400, {{"status", "malformed"}, {"detail", "missing device_id parameter"}});
      return;
    }
    EpochMs from_ts = std::numeric_limits<EpochMs>::min();
    EpochMs to_ts = std::numeric_limits<EpochMs>::max();
    try {
      if (req.has_param("from")) from_ts = parse_timestamp(req.get_param_value("from"));
      if (req.has_param("to")) to_ts = parse_timestamp(req.get_param_value("to"));
    } catch (const ParseError& e) {
      reply(res, 400, {{"status", "malformed"}, {"detail", e.what()}});
      return;
    }
    const auto result = service.query_records(req.get_param_value("device_id"), from_ts, to_ts,
                                              req.get_header_value(kApiKeyHeader));
    if (result.status == IngestStatus::kUnauthorized) {
      reply(res, 401, {{"status", "unauthorized"}, {"detail", result.detail}});
      return;
    }
    if (result.status == IngestStatus::kBadRange) {
      reply(res, 400, {{"status", "bad_range"}, {"detail", result.detail}});
      return;
    }
    json records = json::array();
    for (const StoredRecord& r : result.records) records.push_back(record_json(r));
    reply(res, 200, {{"device_id", req.get_param_value("device_id")},
                     {"count", result.records.size()},
                     {"records", std::move(records)}});
  });

  server.Get("/v1/devices", [this](const httplib::Request& req, httplib::Response& res) {
    bool authorized = false;
    const auto ids = service.device_ids(req.get_header_value(kApiKeyHeader), authorized);
    if (!authorized) {
      reply(res, 401, {{"status", "unauthorized"}, {"detail", "invalid API key"}});
      return;
    }
    reply(res, 200, {{"devices", ids}});
  });

  server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}, {"records", service.store_size()}});
  });
}

IngestHttpServer::IngestHttpServer(IngestService& service) : impl_(new Impl(service)) {
  impl_->install_routes();
}

IngestHttpServer::~IngestHttpServer() {
  stop();
}

bool IngestHttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
    return impl_->port > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  impl_->port = port;
  return true;
}

bool IngestHttpServer::serve() {
  return impl_->server.listen_after_bind();
}

void IngestHttpServer::wait_until_ready() {
  impl_->server.wait_until_ready();
}

void IngestHttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

int IngestHttpServer::port() const {
  return impl_->port;
}

}  // namespace cargotrack
