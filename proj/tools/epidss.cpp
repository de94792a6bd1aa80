// epidss: command-line front end to the forecasting, allocation and
// lockdown engines, and launcher for the HTTP service.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "epidss/service/api.hpp"
#include "epidss/service/config.hpp"
#include "epidss/service/http_server.hpp"

using nlohmann::json;
namespace svc = epidss::service;

namespace {

svc::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) {
    g_server->stop();
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw svc::RequestError("/", "cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& err) {
    throw svc::RequestError("/", path + " is not valid JSON: " + err.what());
  }
}

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

std::string pad(std::string text, std::size_t width) {
  if (text.size() < width) {
    text.insert(0, width - text.size(), ' ');
  }
  return text;
}

void print_regions(const json& data) {
  std::cout << "code  name                                      days  first       last\n";
  for (const auto& r : data) {
    std::string name = r.at("name").get<std::string>();
    name.resize(40, ' ');
    std::string code = r.at("code").get<std::string>();
    code.resize(4, ' ');
    std::cout << code << "  " << name << pad(std::to_string(r.at("days").get<int>()), 6) << "  "
              << r.value("first_date", "") << "  " << r.value("last_date", "") << "\n";
  }
}

void print_forecast(const json& data) {
  std::cout << data["region"]["name"].get<std::string>() << " (" << data["region"]["code"].get<std::string>()
            << "), " << data["kind"].get<std::string>() << ", next " << data["horizon"].get<int>() << " days\n";
  std::cout << "date           predicted\n";
  for (const auto& p : data["points"]) {
    std::cout << p["date"].get<std::string>() << pad(fixed(p["value"].get<double>(), 1), 14) << "\n";
  }
  const auto& model = data["model"];
  std::cout << "model: order " << model["model_order"].get<int>() << ", window " << model["window"].get<int>()
            << ", discount " << model["discount"].get<double>() << ", transform "
            << model["transform"].get<std::string>() << ", residual " << model["residual_norm"].get<double>()
            << "\n";
}

void print_backtest(const json& data) {
  std::cout << "date              actual     predicted     abs error   pct error\n";
  for (const auto& d : data["days"]) {
    std::cout << d["date"].get<std::string>() << pad(fixed(d["actual"].get<double>(), 1), 14)
              << pad(fixed(d["predicted"].get<double>(), 1), 14) << pad(fixed(d["absolute_error"].get<double>(), 1), 14)
              << pad(d["percentage_error"].is_null() ? "-" : fixed(d["percentage_error"].get<double>(), 2) + "%", 12)
              << "\n";
  }
  const auto& mape = data["mean_absolute_percentage_error"];
  std::cout << "MAE " << fixed(data["mean_absolute_error"].get<double>(), 2) << ", MAPE "
            << (mape.is_null() ? std::string("n/a") : fixed(mape.get<double>(), 2) + "%") << "\n";
}

void print_allocation(const json& data) {
  const auto unit = data["item"]["unit"].get<std::string>();
  std::cout << "item " << data["item"]["name"].get<std::string>() << " (" << unit << "), supply "
            << fixed(data["supply"].get<double>(), 1) << ", blend " << data["blend"].get<double>() << "\n";
  std::cout << "unit        demand   peak active     effective         award\n";
  for (const auto& a : data["awards"]) {
    std::string code = a["unit"].get<std::string>();
    code.resize(6, ' ');
    std::cout << code << pad(fixed(a["demand"].get<double>(), 1), 12) << pad(fixed(a["peak_active"].get<double>(), 0), 14)
              << pad(fixed(a["effective_demand"].get<double>(), 1), 14) << pad(a["award_display"].get<std::string>(), 14)
              << "\n";
  }
  std::cout << "total " << pad(fixed(data["total_demand"].get<double>(), 1), 12) << pad("", 28)
            << pad(data["total_awarded_display"].get<std::string>(), 14) << "\n";
  std::cout << (data["exhausted"].get<bool>() ? "supply exhausted\n" : "all demands met\n");
}

void print_lockdown(const json& data) {
  const bool lockdown = data["recommendation"].get<std::string>() == "lockdown";
  std::cout << (lockdown ? "LOCKDOWN" : "NO LOCKDOWN") << "  (" << data["region"]["name"].get<std::string>()
            << ", " << data["horizon"].get<int>() << "-day horizon, " << data["mode"].get<std::string>() << ")\n";
  for (const auto& item : data["items"]) {
    std::cout << item["item"]["name"].get<std::string>() << ": available " << fixed(item["available"].get<double>(), 2)
              << " " << item["item"]["unit"].get<std::string>() << ", " << item["breaches"].size()
              << " breach day(s)\n";
    for (const auto& b : item["breaches"]) {
      std::cout << "  " << b["date"].get<std::string>() << "  demand " << fixed(b["demand"].get<double>(), 2) << "\n";
    }
  }
}

void print_replay(const json& data) {
  std::cout << "snapshot " << data["seq"].get<std::uint64_t>() << " (" << data["kind"].get<std::string>() << "): "
            << (data["match"].get<bool>() ? "reproduced exactly" : "DIVERGED") << "\n";
  for (const auto& p : data["changed_config"]) {
    std::cout << "  config changed: " << p.get<std::string>() << "\n";
  }
  for (const auto& p : data["response_diff"]) {
    std::cout << "  response differs at: " << p.get<std::string>() << "\n";
  }
}

int emit(const svc::ApiResponse& response, bool as_json, void (*human)(const json&)) {
  if (as_json) {
    std::cout << response.text();
  }
  if (!response.ok()) {
    const auto& error = response.body["error"];
    const auto code = error["code"].get<std::string>();
    std::cerr << "error [" << code << "]: " << error["message"].get<std::string>() << "\n";
    return svc::exit_code_for(code);
  }
  if (!as_json && human != nullptr) {
    human(response.body["data"]);
  }
  return 0;
}

int fail(const std::exception_ptr& error, bool as_json) {
  return emit(svc::failure(svc::to_api_error(error)), as_json, nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epidemic decision support: case forecasts, resource allocation, lockdown checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_source;
  std::string snapshot_path;
  std::string log_level = "warn";
  bool as_json = false;
  app.add_option("-c,--config", config_path, "JSON configuration file");
  app.add_option("-d,--data", data_source, "case CSV path or URL (overrides data_source)");
  app.add_option("--snapshots", snapshot_path, "decision log to record to / replay from");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");
  app.add_flag("--json", as_json, "print the JSON envelope instead of a table");

  auto* ingest = app.add_subcommand("ingest", "parse and repair a case CSV");
  std::string ingest_file;
  std::string normalized_out;
  ingest->add_option("file", ingest_file, "CSV file")->required();
  ingest->add_option("--normalized-out", normalized_out, "write the repaired series in normalized form");

  app.add_subcommand("regions", "list regions in the dataset");

  auto* forecast = app.add_subcommand("forecast", "forecast a region's series");
  std::string region;
  std::string kind = "active";
  int horizon = 0;
  forecast->add_option("region", region, "region code, e.g. KA")->required();
  forecast->add_option("--kind", kind, "confirmed, recovered, deceased or active");
  forecast->add_option("--horizon", horizon, "days ahead (1-21)");

  auto* backtest = app.add_subcommand("backtest", "hold out recent days and score the forecast");
  int holdout = 7;
  backtest->add_option("region", region, "region code")->required();
  backtest->add_option("--kind", kind, "series kind");
  backtest->add_option("--holdout", holdout, "held-out days");

  auto* allocate = app.add_subcommand("allocate", "allocate an item's supply among units");
  std::string problem_file;
  allocate->add_option("problem", problem_file, "allocation request JSON")->required()->check(CLI::ExistingFile);

  auto* lockdown = app.add_subcommand("lockdown", "check availabilities against forecast demand");
  std::string availability_file;
  std::string lockdown_region;
  lockdown->add_option("availabilities", availability_file, "lockdown request JSON")
      ->required()
      ->check(CLI::ExistingFile);
  lockdown->add_option("--region", lockdown_region, "region code (overrides the file)");

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  std::string listen;
  serve->add_option("--listen", listen, "host:port (overrides config and EPIDSS_LISTEN)");

  app.add_subcommand("snapshots", "list recorded decisions");
  auto* replay = app.add_subcommand("replay", "re-run a recorded decision and compare");
  std::uint64_t seq = 0;
  replay->add_option("seq", seq, "snapshot sequence number")->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("epidss"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  svc::AppConfig config;
  std::shared_ptr<svc::SnapshotStore> store;
  try {
    if (!config_path.empty()) {
      config = svc::load_config(config_path);
    }
    svc::apply_env_overrides(config);
    if (!data_source.empty()) {
      config.data_source = data_source;
    }
    if (!listen.empty()) {
      config.listen = listen;
      svc::split_listen_address(listen);
    }
    if (serve->parsed()) {
      store = std::make_shared<svc::SnapshotStore>(snapshot_path.empty() ? config.snapshot_log : snapshot_path);
    } else if (!snapshot_path.empty()) {
      store = std::make_shared<svc::SnapshotStore>(snapshot_path);
    }
  } catch (...) {
    return fail(std::current_exception(), as_json);
  }

  svc::DecisionService service(config, store);

  if (ingest->parsed()) {
    std::string raw;
    try {
      raw = read_file(ingest_file);
    } catch (...) {
      return fail(std::current_exception(), as_json);
    }
    auto response = service.ingest(raw, ingest_file);
    if (response.ok() && !normalized_out.empty()) {
      std::ofstream out(normalized_out, std::ios::binary);
      out << epidss::serialize_csv(service.dataset()->dataset);
      if (!out) {
        return fail(std::make_exception_ptr(svc::StorageError("cannot write " + normalized_out)), as_json);
      }
    }
    if (!response.ok() || as_json) {
      return emit(response, as_json, nullptr);
    }
    return emit(service.regions(), false, print_regions);
  }

  const bool needs_data = !(allocate->parsed() || app.got_subcommand("snapshots"));
  if (!config.data_source.empty()) {
    try {
      service.refresh();
    } catch (...) {
      return fail(std::current_exception(), as_json);
    }
  } else if (needs_data && !serve->parsed() && !replay->parsed()) {
    return fail(std::make_exception_ptr(svc::SourceError("no data source; pass --data or set data_source")),
                as_json);
  }

  try {
    if (app.got_subcommand("regions")) {
      return emit(service.regions(), as_json, print_regions);
    }
    if (forecast->parsed()) {
      json request = {{"region", region}, {"kind", kind}};
      if (horizon != 0) {
        request["horizon"] = horizon;
      }
      return emit(service.forecast(request), as_json, print_forecast);
    }
    if (backtest->parsed()) {
      return emit(service.backtest({{"region", region}, {"kind", kind}, {"holdout", holdout}}), as_json,
                  print_backtest);
    }
    if (allocate->parsed()) {
      return emit(service.allocate(read_json_file(problem_file)), as_json, print_allocation);
    }
    if (lockdown->parsed()) {
      json request = read_json_file(availability_file);
      if (!lockdown_region.empty() && request.is_object()) {
        request["region"] = lockdown_region;
      }
      return emit(service.lockdown(request), as_json, print_lockdown);
    }
    if (app.got_subcommand("snapshots")) {
      return emit(service.snapshots(), true, nullptr);
    }
    if (replay->parsed()) {
      return emit(service.replay(seq), as_json, print_replay);
    }
    if (serve->parsed()) {
      const auto [host, port] = svc::split_listen_address(config.listen);
      svc::HttpServer server(service);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      spdlog::set_level(std::min(spdlog::get_level(), spdlog::level::info));
      spdlog::info("listening on {}:{} (snapshots: {})", host, bound, store->path().string());
      server.serve();
      g_server = nullptr;
      return 0;
    }
  } catch (...) {
    return fail(std::current_exception(), as_json);
  }
  return 0;
}
