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

#include <memory>
#include <string>

namespace cargotrack {

class IngestService;

/// HTTP surface of the ingestion service:
///
///   POST /v1/batches                              X-Api-Key, body: batch JSON
///   GET  /v1/records?device_id=&from=&to=         X-Api-Key
///   GET  /v1/devices                              X-Api-Key
///   GET  /v1/health                               no auth
///
/// Status mapping: ack -> 200, unauthorized -> 401, malformed/bad range
/// -> 400. Request handling is concurrent; IngestService serializes store
/// access internally.
class IngestHttpServer {
 public:
  explicit IngestHttpServer(IngestService& service);
  ~IngestHttpServer();

  IngestHttpServer(const IngestHttpServer&) = delete;
  IngestHttpServer& operator=(const IngestHttpServer&) = delete;

  /// Bind to host:port. Port 0 picks a free port (see port()).
  bool bind(const std::string& host, int port);

  /// Serve until stop(); returns false if the listener failed.
  bool serve();

  /// Block until the listener is accepting connections.
  void wait_until_ready();

  void stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cargotrack
