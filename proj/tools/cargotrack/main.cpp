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
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "cargotrack/analytics.hpp"
#include "cargotrack/device.hpp"
#include "cargotrack/errors.hpp"
#include "cargotrack/ingest.hpp"
#include "cargotrack/ingest_http.hpp"
#include "cargotrack/report.hpp"
#include "cargotrack/scenario.hpp"
#include "cargotrack/simulation.hpp"
#include "cargotrack/time_util.hpp"
#include "cargotrack/wire.hpp"

namespace fs = std::filesystem;
using namespace cargotrack;

namespace {

constexpr const char* kApiKeyHeader = "X-Api-Key";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_url(const std::string& source) {
  return source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0;
}

std::string strip_trailing_slash(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

std::unique_ptr<httplib::Client> make_client(const std::string& base_url) {
  auto client = std::make_unique<httplib::Client>(strip_trailing_slash(base_url));
  client->set_connection_timeout(5, 0);
  client->set_read_timeout(5, 0);
  client->set_write_timeout(5, 0);
  return client;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string scenario_path;
  std::string config_path;
  std::string ingest_url;
  std::string out_dir;
  std::string api_key;
  std::uint64_t seed = 42;
  bool verbose = false;
};

int run_simulate(const SimulateOpts& opts) {
  const Scenario scenario = load_scenario(opts.scenario_path);
  DeviceConfig config = scenario.device_config.value_or(DeviceConfig{});
  if (!opts.config_path.empty()) {
    config = parse_device_config_json(read_file(opts.config_path), opts.config_path);
  }

  std::unique_ptr<httplib::Client> client;
  UplinkChannel channel;
  int transport_failures = 0;
  int rejections = 0;
  bool channel_dead = false;
  std::string last_failure;

  if (!opts.ingest_url.empty()) {
    client = make_client(opts.ingest_url);
    channel = [&](const UplinkBatch& batch, NetworkKind) {
      // A dead endpoint would otherwise be retried every tick for the rest
      // of the journey; give up on it after a few straight failures.
      if (channel_dead) return false;
      const auto res = client->Post("/v1/batches", {{kApiKeyHeader, opts.api_key}},
                                    serialize_batch(batch), "application/json");
      if (!res) {
        ++transport_failures;
        last_failure = "transport error: " + httplib::to_string(res.error());
        if (transport_failures >= 5) channel_dead = true;
        return false;
      }
      transport_failures = 0;
      if (res->status != 200) {
        ++rejections;
        last_failure = "server rejected batch seq " + std::to_string(batch.seq) + ": HTTP " +
                       std::to_string(res->status) + " " + res->body;
        channel_dead = true;  // 401/400 do not heal by retrying
        return false;
      }
      if (opts.verbose) {
        std::printf("posted batch seq=%llu records=%zu\n",
                    static_cast<unsigned long long>(batch.seq), batch.records.size());
      }
      return true;
    };
  }

  const JourneyLog log = run_simulation(scenario, config, opts.seed, channel);

  if (opts.verbose) {
    for (const FlushEvent& e : log.flush_events) {
      std::printf("flush ts=%lld network=%s seq=%llu records=%zu acked=%s battery=%.3f%%\n",
                  static_cast<long long>(e.ts), std::string(to_string(e.network)).c_str(),
                  static_cast<unsigned long long>(e.seq), e.records_sent,
                  e.acked ? "yes" : "no", e.battery_pct);
    }
  }

  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    const fs::path out(opts.out_dir);
    for (const UplinkBatch& batch : log.batches) {
      char name[32];
      std::snprintf(name, sizeof name, "batch_%06llu.json",
                    static_cast<unsigned long long>(batch.seq));
      write_text_file((out / name).string(), serialize_batch(batch) + "\n");
    }
    write_text_file((out / "journey.jsonl").string(), serialize_journey_log(log));
    write_text_file((out / "battery.csv").string(), battery_report_csv(log));
    if (opts.verbose) {
      std::printf("wrote %zu batch files, journey.jsonl and battery.csv to %s\n",
                  log.batches.size(), opts.out_dir.c_str());
    }
  }

  std::printf("captured=%zu persisted=%zu buffered=%zu dropped=%llu conserved=%s\n",
              log.captures.size(), log.acked_record_count(), log.buffered_at_end.size(),
              static_cast<unsigned long long>(log.dropped_count),
              log.conservation_holds() ? "yes" : "no");
  std::printf("final_battery=%.3f%% samples=%lld flushes=%zu\n", log.final_battery_pct,
              static_cast<long long>(log.total_samples), log.flush_events.size());

  if (!log.conservation_holds()) {
    std::fprintf(stderr, "error: conservation of events violated\n");
    return 1;
  }
  if (transport_failures > 0 || rejections > 0 || channel_dead) {
    std::fprintf(stderr, "error: uplink failures during run; last: %s\n", last_failure.c_str());
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// calibrate

int run_calibrate(const std::string& drops_path) {
  const auto trials = load_drop_trials_csv(drops_path);
  const CalibrationConstant c = calibrate_lambda(trials);
  std::printf("lambda = %.6g\n", c.lambda);
  std::printf("residual_rms = %.6g\n", c.residual_rms);
  std::printf("trials = %zu\n", trials.size());
  return 0;
}

// ---------------------------------------------------------------------------
// serve

IngestHttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

std::vector<std::string> split_keys(const std::string& joined) {
  std::vector<std::string> keys;
  std::size_t pos = 0;
  while (pos <= joined.size()) {
    const std::size_t comma = joined.find(',', pos);
    const std::string key =
        comma == std::string::npos ? joined.substr(pos) : joined.substr(pos, comma - pos);
    if (!key.empty()) keys.push_back(key);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return keys;
}

struct ServeOpts {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
  bool verbose = false;
};

int run_serve(const ServeOpts& opts) {
  const char* env = std::getenv("CARGOTRACK_API_KEY");
  const std::vector<std::string> keys = env ? split_keys(env) : std::vector<std::string>{};
  if (keys.empty()) {
    std::fprintf(stderr,
                 "error: CARGOTRACK_API_KEY must be set to a non-empty, comma-separated key "
                 "list before serving\n");
    return 2;
  }

  RecordStore store = opts.data_dir.empty() ? RecordStore() : RecordStore(opts.data_dir);
  if (opts.data_dir.empty()) {
    std::fprintf(stderr, "warning: no --data directory given; records are not durable\n");
  }
  IngestService service(std::move(store), keys);
  IngestHttpServer server(service);

  if (!server.bind(opts.host, opts.port)) {
    std::fprintf(stderr, "error: cannot bind %s:%d\n", opts.host.c_str(), opts.port);
    return 2;
  }

  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  std::printf("listening on http://%s:%d (%zu records indexed)\n", opts.host.c_str(),
              server.port(), service.store_size());
  std::fflush(stdout);

  server.serve();
  g_server = nullptr;

  service.flush_log();
  std::printf("shut down cleanly; %zu records stored\n", service.store_size());
  return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportOpts {
  std::string source;
  std::string device;
  std::string from_str;
  std::string to_str;
  std::string legs_path;
  double lambda = 0.0;
  std::string drops_path;
  double threshold = kDefaultHighThresholdG;
  std::string out_dir = "report";
  std::string api_key;
  bool verbose = false;
};

std::vector<StoredRecord> fetch_records_http(const ReportOpts& opts, EpochMs from_ts,
                                             EpochMs to_ts) {
  const auto client = make_client(opts.source);
  const httplib::Headers headers{{kApiKeyHeader, opts.api_key}};

  auto devices_res = client->Get("/v1/devices", headers);
  if (!devices_res) {
    throw Error(opts.source + ": unreachable (" + httplib::to_string(devices_res.error()) + ")");
  }
  if (devices_res->status == 401) throw Error("server rejected API key (HTTP 401)");
  if (devices_res->status != 200) {
    throw Error("GET /v1/devices failed: HTTP " + std::to_string(devices_res->status));
  }
  const auto devices = nlohmann::json::parse(devices_res->body).at("devices");
  if (std::find(devices.begin(), devices.end(), nlohmann::json(opts.device)) == devices.end()) {
    throw Error("unknown device \"" + opts.device + "\"");
  }

  httplib::Params params{{"device_id", opts.device},
                         {"from", std::to_string(from_ts)},
                         {"to", std::to_string(to_ts)}};
  auto res = client->Get("/v1/records", params, headers);
  if (!res) {
    throw Error(opts.source + ": unreachable (" + httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw Error("GET /v1/records failed: HTTP " + std::to_string(res->status) + " " + res->body);
  }

  // Keep the parsed document alive for the whole loop: at() returns a
  // reference into it, and a temporary would be gone before the first
  // iteration.
  const nlohmann::json body = nlohmann::json::parse(res->body);
  std::vector<StoredRecord> records;
  for (const auto& element : body.at("records")) {
    records.push_back(parse_stored_record(element.dump()));
  }
  return records;
}

std::vector<StoredRecord> fetch_records_dir(const ReportOpts& opts, EpochMs from_ts,
                                            EpochMs to_ts) {
  if (!fs::is_directory(opts.source)) {
    throw Error(opts.source + ": not a directory (nor an http:// URL)");
  }
  std::vector<fs::path> batch_files;
  for (const auto& entry : fs::directory_iterator(opts.source)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("batch_", 0) == 0 &&
        entry.path().extension() == ".json") {
      batch_files.push_back(entry.path());
    }
  }
  std::sort(batch_files.begin(), batch_files.end());

  RecordStore store;
  for (const fs::path& file : batch_files) {
    store.ingest(parse_batch(read_file(file.string())));
  }
  if (!store.has_device(opts.device)) {
    throw Error("unknown device \"" + opts.device + "\" in " + opts.source);
  }
  return store.query(opts.device, from_ts, to_ts);
}

int run_report(const ReportOpts& opts) {
  const std::vector<LegDef> legs = load_legs(opts.legs_path);

  EpochMs from_ts = legs.front().from_ts;
  EpochMs to_ts = legs.front().to_ts;
  for (const LegDef& leg : legs) {
    from_ts = std::min(from_ts, leg.from_ts);
    to_ts = std::max(to_ts, leg.to_ts);
  }
  if (!opts.from_str.empty()) from_ts = parse_timestamp(opts.from_str);
  if (!opts.to_str.empty()) to_ts = parse_timestamp(opts.to_str);
  if (from_ts >= to_ts) {
    throw ValidationError("--to", "report range must be non-empty (from < to)");
  }

  double lambda = opts.lambda;
  if (!opts.drops_path.empty()) {
    const CalibrationConstant c = calibrate_lambda(load_drop_trials_csv(opts.drops_path));
    lambda = c.lambda;
    if (opts.verbose) {
      std::printf("calibrated lambda = %.6g (residual_rms %.6g, %zu trials)\n", c.lambda,
                  c.residual_rms, c.fitted_from.size());
    }
  }

  const std::vector<StoredRecord> records = is_url(opts.source)
                                                ? fetch_records_http(opts, from_ts, to_ts)
                                                : fetch_records_dir(opts, from_ts, to_ts);

  const AggregateResult result = aggregate(records, legs, lambda, opts.threshold);

  ReportSpec spec;
  spec.title = "Impact report: " + opts.device;
  spec.device_id = opts.device;
  spec.from_ts = from_ts;
  spec.to_ts = to_ts;
  spec.high_threshold_g = opts.threshold;

  fs::create_directories(opts.out_dir);
  const fs::path out(opts.out_dir);
  write_text_file((out / "impact.svg").string(), render_impact_plot(result.impacts, legs, spec));
  write_text_file((out / "leg_stats.csv").string(), leg_stats_csv(result.stats));
  write_text_file((out / "impacts.csv").string(), impacts_csv(result.impacts));

  std::printf("%-16s %-5s %8s %7s %7s %9s %9s\n", "leg", "kind", "n_total", "n_high", "n_low",
              "max_g", "mean_g");
  for (const LegStats& s : result.stats) {
    std::printf("%-16s %-5s %8zu %7zu %7zu %9.3f %9.3f\n", s.leg_label.c_str(),
                s.kind ? std::string(to_string(*s.kind)).c_str() : "-", s.n_total, s.n_high,
                s.n_low, s.max_g, s.mean_g);
  }
  std::printf("%zu impacts (%lld..%lld), lambda=%.6g, threshold=%.6g g, outputs in %s\n",
              result.impacts.size(), static_cast<long long>(from_ts),
              static_cast<long long>(to_ts), lambda, opts.threshold, opts.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cargotrack: low-cost cargo impact tracking toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "print per-flush and per-request details");

  SimulateOpts sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run a device through a scenario");
  simulate->fallthrough();
  simulate->add_option("--scenario", sim.scenario_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--config", sim.config_path,
                       "device config JSON (overrides the scenario's embedded config)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "noise RNG seed (default 42)");
  auto* url_opt = simulate->add_option("--ingest-url", sim.ingest_url,
                                       "POST batches to this ingest server");
  auto* out_opt = simulate->add_option("--out", sim.out_dir,
                                       "write batches, journey log and battery report here");
  url_opt->excludes(out_opt);
  out_opt->excludes(url_opt);
  simulate->add_option("--api-key", sim.api_key, "API key for --ingest-url")
      ->envname("CARGOTRACK_API_KEY");

  std::string drops_path;
  CLI::App* calibrate = app.add_subcommand("calibrate", "fit lambda from drop-trial CSV");
  calibrate->fallthrough();
  calibrate->add_option("--drops", drops_path, "drop trials CSV (known_g,x,y,z)")
      ->required()
      ->check(CLI::ExistingFile);

  ServeOpts srv;
  CLI::App* serve = app.add_subcommand("serve", "run the ingestion service");
  serve->fallthrough();
  serve->add_option("--host", srv.host, "bind address (default 127.0.0.1)");
  serve->add_option("--port", srv.port, "port, 0 for any free port (default 8080)");
  serve->add_option("--data", srv.data_dir, "data directory for the durable record log");

  ReportOpts rep;
  CLI::App* report = app.add_subcommand("report", "build impact plot and CSV summaries");
  report->fallthrough();
  report->add_option("--source", rep.source, "ingest server URL or a simulate --out directory")
      ->required();
  report->add_option("--device", rep.device, "device id to report on")->required();
  report->add_option("--from", rep.from_str, "range start, epoch ms or RFC 3339 "
                     "(default: start of first leg)");
  report->add_option("--to", rep.to_str, "range end, epoch ms or RFC 3339 "
                     "(default: end of last leg)");
  report->add_option("--legs", rep.legs_path, "legs JSON (a scenario file also works)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* lambda_opt = report->add_option("--lambda", rep.lambda, "calibration constant, g per count")
                         ->check(CLI::PositiveNumber);
  auto* rep_drops_opt =
      report->add_option("--drops", rep.drops_path, "calibrate lambda from this CSV instead")
          ->check(CLI::ExistingFile);
  lambda_opt->excludes(rep_drops_opt);
  rep_drops_opt->excludes(lambda_opt);
  report->add_option("--threshold", rep.threshold, "HIGH/LOW cut in g (default 8)")
      ->check(CLI::PositiveNumber);
  report->add_option("--out", rep.out_dir, "output directory (default ./report)");
  report->add_option("--api-key", rep.api_key, "API key for URL sources")
      ->envname("CARGOTRACK_API_KEY");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  sim.verbose = verbose;
  srv.verbose = verbose;
  rep.verbose = verbose;

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (calibrate->parsed()) return run_calibrate(drops_path);
    if (serve->parsed()) return run_serve(srv);
    if (report->parsed()) {
      if (rep.lambda <= 0.0 && rep.drops_path.empty()) {
        std::fprintf(stderr, "error: report needs --lambda or --drops\n");
        return 2;
      }
      return run_report(rep);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 2;
}
