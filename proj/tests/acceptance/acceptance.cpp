// Acceptance gate. One PASS/FAIL line per criterion with its runtime;
// the exit status is non-zero if any criterion fails.

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "epidss/allocator.hpp"
#include "epidss/case_data.hpp"
#include "epidss/forecaster.hpp"
#include "epidss/lockdown.hpp"
#include "epidss/service/api.hpp"
#include "epidss/service/http_server.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace epidss;
using namespace epidss::service;
using nlohmann::json;

namespace {

const std::string kFixture = EPIDSS_FIXTURE;
const std::string kSourceDir = EPIDSS_SOURCE_DIR;
const std::string kCli = EPIDSS_CLI;

// Collects the first few failure messages of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (notes_.size() < 5) notes_.push_back(what);
    }
  }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    std::string s = std::to_string(checks_ - failures_) + "/" + std::to_string(checks_) + " checks";
    for (const auto& n : notes_) s += "; " + n;
    return s;
  }
  void note(const std::string& text) { extra_ += text; }
  const std::string& extra() const { return extra_; }

 private:
  long checks_ = 0;
  long failures_ = 0;
  std::vector<std::string> notes_;
  std::string extra_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct CommandResult {
  int status = -1;
  std::string out;
};

CommandResult run(const std::string& args) {
  const std::string command = "'" + kCli + "' " + args + " 2>/dev/null";
  CommandResult result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) result.out.append(buffer.data(), n);
  const int raw = ::pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

struct LiveServer {
  DecisionService service;
  HttpServer server{service};
  int port = 0;
  std::thread thread;

  LiveServer(AppConfig config, std::shared_ptr<SnapshotStore> store) : service(std::move(config), std::move(store)) {
    service.refresh();
    port = server.bind("127.0.0.1", 0);
    thread = std::thread([this] { server.serve(); });
    for (int i = 0; i < 400 && !server.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

AppConfig fixture_config() {
  AppConfig c;
  c.data_source = kFixture;
  return c;
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_oxygen_awards(Check& check, const json& data, const std::string& via) {
  double sum = 0.0;
  for (const auto& a : data.at("awards")) {
    const double x = a.at("award").get<double>();
    sum += x;
    check.expect(x >= 0.0 && x <= a.at("demand").get<double>(), via + ": award outside [0, d] for " +
                                                                    a.at("unit").get<std::string>());
  }
  check.expect(std::abs(sum - 3200.0) <= 1e-6 * 3200.0, via + ": sum of awards " + std::to_string(sum));
}

// Oxygen fixture through the HTTP API and the CLI.
bool oxygen_fixture(Check& check) {
  LiveServer live(fixture_config(), nullptr);
  auto client = live.client();
  for (const char* name : {"oxygen_allocation.json", "oxygen_allocation_forecast.json"}) {
    const std::string path = kSourceDir + "/data/requests/" + name;
    auto res = client.Post("/allocate", slurp(path), "application/json");
    check.expect(res && res->status == 200, std::string("HTTP allocate failed for ") + name);
    if (res && res->status == 200) check_oxygen_awards(check, json::parse(res->body).at("data"), "HTTP " + std::string(name));

    const auto cli = run("--data '" + kFixture + "' --json allocate '" + path + "'");
    check.expect(cli.status == 0, std::string("CLI allocate exit status for ") + name);
    if (cli.status == 0) check_oxygen_awards(check, json::parse(cli.out).at("data"), "CLI " + std::string(name));
  }
  const auto table = run("--data '" + kFixture + "' allocate '" + kSourceDir + "/data/requests/oxygen_allocation.json'");
  check.expect(table.out.find("total ") != std::string::npos && table.out.find("3200.0\n") != std::string::npos,
               "CLI table total row does not read 3200.0");
  return check.ok();
}

AllocationProblem random_problem(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 1 + rng() % 10;
  AllocationProblem p{{"oxygen", "MT", 0.0015}, 0.0, {}, 0.5};
  for (std::size_t i = 0; i < n; ++i) {
    const double d = rng() % 8 == 0 ? 0.0 : 1.0 + 3000.0 * u(rng);
    const double a = rng() % 10 == 0 ? 0.0 : 5e5 * u(rng);
    p.claims.push_back({{"U" + std::to_string(i), ""}, d, a});
  }
  if (rng() % 4 == 0 && n > 1) p.claims[1] = {{"U1", ""}, p.claims[0].demand, p.claims[0].peak_active};
  double sum_d = 0.0;
  for (const auto& c : p.claims) sum_d += c.demand;
  p.supply = sum_d * 1.2 * u(rng);
  p.blend = rng() % 6 == 0 ? 1.0 : u(rng);
  return p;
}

std::vector<double> demands_of(const AllocationProblem& p) {
  std::vector<double> d;
  for (const auto& c : p.claims) d.push_back(c.demand);
  return d;
}

// Allocator against the bisection oracle plus its properties.
bool allocator_oracle(Check& check) {
  std::mt19937_64 rng(500);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    auto p = random_problem(rng);
    const auto d = demands_of(p);
    const auto r = allocate(p);
    const std::string tag = "instance " + std::to_string(trial);

    std::vector<double> a;
    for (const auto& c : p.claims) a.push_back(c.peak_active);
    if (total(d) > 0.0) {
      const auto ref = oracle::bisect_awards(d, oracle::effective(d, a, p.blend), p.supply);
      for (std::size_t i = 0; i < d.size(); ++i) {
        check.expect(std::abs(r.awards[i] - ref.x[i]) <= 1e-6 * std::max(1.0, ref.x[i]), tag + ": oracle mismatch");
      }
      if (r.scale && ref.scale) {
        check.expect(std::abs(*r.scale - *ref.scale) <= 1e-6 * std::max(1.0, *ref.scale), tag + ": scale mismatch");
      }
    }

    const double target = std::min(p.supply, total(d));
    for (std::size_t i = 0; i < d.size(); ++i) {
      check.expect(r.awards[i] >= 0.0 && r.awards[i] <= d[i], tag + ": infeasible award");
    }
    check.expect(std::abs(total(r.awards) - target) <= 1e-9 * std::max(1.0, target), tag + ": conservation");

    auto more = p;
    more.supply += 1000.0 * u(rng);
    const auto rm = allocate(more);
    for (std::size_t i = 0; i < d.size(); ++i) {
      check.expect(rm.awards[i] >= r.awards[i] - 1e-9 * std::max(1.0, r.awards[i]), tag + ": supply monotonicity");
    }

    auto scaled = p;
    const double c = 0.1 + 10.0 * u(rng);
    scaled.supply *= c;
    for (auto& claim : scaled.claims) claim.demand *= c;
    const auto rs = allocate(scaled);
    for (std::size_t i = 0; i < d.size(); ++i) {
      check.expect(std::abs(rs.awards[i] - c * r.awards[i]) <= 1e-9 * std::max(1.0, c * r.awards[i]),
                   tag + ": scale equivariance");
    }

    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        const auto& ci = p.claims[i];
        const auto& cj = p.claims[j];
        if (ci.demand == cj.demand && ci.peak_active == cj.peak_active) {
          check.expect(std::abs(r.awards[i] - r.awards[j]) <= 1e-12 * std::max(1.0, r.awards[i]), tag + ": symmetry");
        }
        if (p.blend < 1.0 && ci.demand == cj.demand) {
          const bool i_severe = ci.peak_active >= cj.peak_active;
          const double hi = i_severe ? r.awards[i] : r.awards[j];
          const double lo = i_severe ? r.awards[j] : r.awards[i];
          check.expect(hi >= lo - 1e-9 * std::max(1.0, lo), tag + ": severity monotonicity");
        }
      }
    }
  }
  return check.ok();
}

// Polynomial generator whose values stay inside the region where the
// forecaster's clamps are inactive, so the forecast must equal it.
struct Generator {
  std::vector<double> c;
  double operator()(double t) const {
    double v = 0.0, p = 1.0;
    for (double k : c) {
      v += k * p;
      p *= t;
    }
    return v;
  }
};

Generator random_generator(std::mt19937_64& rng, int degree, double span, bool monotone, double top) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Generator g{std::vector<double>(static_cast<std::size_t>(degree) + 1, 0.0)};
  for (int k = 1; k <= degree; ++k) {
    const double magnitude = u(rng) / std::pow(span, k);
    g.c[k] = monotone ? magnitude : magnitude * (u(rng) < 0.5 ? -1.0 : 1.0);
  }
  double lo = g(0.0), hi = g(0.0);
  for (int s = 0; s <= 400; ++s) {
    const double v = g(span * s / 400.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Rescale the shape into [base, top] with a positive floor.
  const double base = top * (0.05 + 0.3 * u(rng));
  const double width = hi - lo;
  const double factor = width > 0.0 ? (top - base) / width : 0.0;
  for (auto& k : g.c) k *= factor;
  g.c[0] += base - lo * factor;
  return g;
}

bool forecaster_exactness(Check& check) {
  std::mt19937_64 rng(200);
  for (int series = 0; series < 200; ++series) {
    const int order = 1 + static_cast<int>(rng() % 3);
    const int degree = static_cast<int>(rng() % (order + 1));
    const int window = std::max(order + 2, 7 + static_cast<int>(rng() % 22));
    const int n = window + static_cast<int>(rng() % 30);
    const bool log_domain = series % 2 == 1;
    const bool cumulative = log_domain || rng() % 2 == 0;
    const double span = static_cast<double>(n - 1 + 14);
    const auto g = random_generator(rng, degree, span, cumulative, log_domain ? 16.0 : 1e6);

    std::vector<double> values(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) values[t] = log_domain ? std::expm1(g(t)) : g(t);

    for (double rho : {0.5, 0.9, 1.0}) {
      ForecastConfig config;
      config.window = window;
      config.horizon = 14;
      config.discount = rho;
      config.model_order = order;
      config.transform = log_domain ? Transform::log1p : Transform::identity;
      const auto f = forecast_values({"TS", "Test"}, cumulative ? SeriesKind::confirmed : SeriesKind::active, values,
                                     make_date(2021, 5, 10), config);
      for (int h = 1; h <= 14; ++h) {
        const double x = static_cast<double>(n - 1 + h);
        const double want = log_domain ? std::expm1(g(x)) : g(x);
        const double got = f.points[h - 1].value;
        check.expect(std::abs(got - want) <= 1e-6 * std::abs(want),
                     "series " + std::to_string(series) + " rho " + std::to_string(rho) + " day " +
                         std::to_string(h) + ": got " + std::to_string(got) + " want " + std::to_string(want));
      }
    }
  }
  return check.ok();
}

bool fixture_backtest(Check& check) {
  const auto data = validate_and_repair(parse_csv(slurp(kFixture)));
  check.expect(data.size() >= 1, "fixture has no regions");
  const std::array kinds{SeriesKind::confirmed, SeriesKind::recovered, SeriesKind::deceased, SeriesKind::active};
  std::string mapes;
  for (const auto& series : data.series()) {
    for (const auto kind : kinds) {
      const auto report = backtest(series, kind, ForecastConfig{}, 7);
      const std::string tag = series.region.code + "/" + to_string(kind);
      check.expect(report.days.size() == 7, tag + ": holdout length");
      check.expect(report.mean_absolute_percentage_error.has_value() &&
                       std::isfinite(*report.mean_absolute_percentage_error),
                   tag + ": MAPE not finite");
      if (report.mean_absolute_percentage_error && kind != SeriesKind::recovered && kind != SeriesKind::deceased) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), " %s=%.2f%%", tag.c_str(), *report.mean_absolute_percentage_error);
        mapes += buf;
      }
      const auto observed = extract(series, kind);
      double floor = is_cumulative(kind) ? observed[observed.size() - 8] : 0.0;
      for (const auto& p : report.forecast.points) {
        check.expect(p.value >= floor && std::isfinite(p.value), tag + ": clamp violated");
        if (is_cumulative(kind)) floor = p.value;
      }
    }
  }
  check.note("MAPE" + mapes);
  return check.ok();
}

Forecast random_active_forecast(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> active(30);
  double level = 1e5 * u(rng);
  const double drift = 4000.0 * (u(rng) - 0.5);
  for (auto& v : active) {
    level = std::max(0.0, level + drift + 3000.0 * (u(rng) - 0.5));
    v = std::round(level);
  }
  return forecast_values({"TS", "Test"}, SeriesKind::active, active, make_date(2021, 5, 10));
}

std::vector<std::size_t> indices(const ItemAssessment& item, const Forecast& f) {
  std::vector<std::size_t> out;
  for (const auto& b : item.breaches) {
    out.push_back(static_cast<std::size_t>((b.date - f.points.front().date).count()));
  }
  return out;
}

bool lockdown_oracle(Check& check) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_active_forecast(rng);
    std::vector<double> curve;
    for (int t = 0; t < 14; ++t) curve.push_back(f.points[t].value);
    const double peak = *std::max_element(curve.begin(), curve.end());
    const double kappa = rng() % 10 == 0 ? 0.0 : 0.01 * u(rng);
    const double available = kappa * peak * 1.3 * u(rng);
    const bool stock = trial % 4 == 3;
    LockdownOptions options;
    options.mode = stock ? LockdownMode::stock_depletion : LockdownMode::day_capacity;
    const double cap = stock ? available * 14.0 : available;
    const std::string tag = "triple " + std::to_string(trial);

    const auto a = assess({{{"item", "u", kappa}, cap}}, f, options);
    const auto want = oracle::breach_days(curve, kappa, cap, stock);
    check.expect(indices(a.items[0], f) == want, tag + ": breach set differs from scan");
    check.expect((a.recommendation == Recommendation::lockdown) == !want.empty(), tag + ": recommendation");
    if (kappa == 0.0) check.expect(a.recommendation == Recommendation::no_lockdown, tag + ": zero kappa");

    const auto richer = assess({{{"item", "u", kappa}, cap * (1.0 + u(rng)) + 1.0}}, f, options);
    const auto b = indices(a.items[0], f);
    const auto r = indices(richer.items[0], f);
    check.expect(std::includes(b.begin(), b.end(), r.begin(), r.end()), tag + ": availability added breaches");
    if (a.recommendation == Recommendation::no_lockdown) {
      check.expect(richer.recommendation == Recommendation::no_lockdown, tag + ": availability created lockdown");
    }
    const auto hungrier = assess({{{"item", "u", kappa * (1.0 + u(rng)) + 1e-4}, cap}}, f, options);
    const auto h = indices(hungrier.items[0], f);
    check.expect(std::includes(h.begin(), h.end(), b.begin(), b.end()), tag + ": kappa removed breaches");
  }
  return check.ok();
}

bool end_to_end(Check& check) {
  TempDir dir;
  const auto server_log = dir / "server.ndjson";
  const auto cli_log = (dir / "cli.ndjson").string();
  auto store = std::make_shared<SnapshotStore>(server_log);
  LiveServer live(fixture_config(), store);
  auto client = live.client();
  const std::string data = "--data '" + kFixture + "' --json ";
  const std::string requests = kSourceDir + "/data/requests/";

  struct Pair {
    std::string name;
    httplib::Result http;
    CommandResult cli;
  };
  std::vector<Pair> pairs;
  pairs.push_back({"forecast", client.Get("/forecast?region=KA&horizon=14"),
                   run(data + "--snapshots '" + cli_log + "' forecast KA --horizon 14")});
  pairs.push_back({"forecast confirmed", client.Get("/forecast?region=MH&kind=confirmed"),
                   run(data + "--snapshots '" + cli_log + "' forecast MH --kind confirmed")});
  pairs.push_back({"allocate", client.Post("/allocate", slurp(requests + "oxygen_allocation_forecast.json"), "application/json"),
                   run(data + "--snapshots '" + cli_log + "' allocate '" + requests + "oxygen_allocation_forecast.json'")});
  pairs.push_back({"lockdown", client.Post("/lockdown", slurp(requests + "lockdown_zero_oxygen.json"), "application/json"),
                   run(data + "--snapshots '" + cli_log + "' lockdown '" + requests + "lockdown_zero_oxygen.json'")});
  pairs.push_back({"lockdown slack", client.Post("/lockdown", slurp(requests + "lockdown_slack.json"), "application/json"),
                   run(data + "--snapshots '" + cli_log + "' lockdown '" + requests + "lockdown_slack.json'")});
  pairs.push_back({"unknown region", client.Get("/forecast?region=ZZ"),
                   run(data + "--snapshots '" + cli_log + "' forecast ZZ --kind active")});
  for (const auto& p : pairs) {
    check.expect(static_cast<bool>(p.http), p.name + ": HTTP request failed");
    if (!p.http) continue;
    check.expect(!p.http->body.empty() && p.http->body == p.cli.out, p.name + ": CLI and HTTP bytes differ");
  }

  // Replay every recorded decision from both logs.
  const auto recorded = store->list();
  check.expect(recorded.size() == pairs.size(), "server recorded " + std::to_string(recorded.size()) + " decisions");
  for (const auto& s : recorded) {
    auto res = client.Post("/snapshots/" + std::to_string(s.seq) + "/replay", "", "application/json");
    check.expect(res && res->status == 200, "replay request failed");
    if (!res) continue;
    const auto body = json::parse(res->body).at("data");
    check.expect(body.at("match") == true && body.at("changed_config").empty(),
                 "server replay diverged for seq " + std::to_string(s.seq));
    check.expect(body.at("replayed").dump() == s.response.dump(), "replayed bytes differ for seq " + std::to_string(s.seq));
  }
  SnapshotStore cli_store(cli_log);
  const auto cli_recorded = cli_store.list();
  check.expect(cli_recorded.size() == pairs.size(), "CLI recorded " + std::to_string(cli_recorded.size()) + " decisions");
  for (const auto& s : cli_recorded) {
    const auto replay = run(data + "--snapshots '" + cli_log + "' replay " + std::to_string(s.seq));
    check.expect(replay.status == 0, "CLI replay failed for seq " + std::to_string(s.seq));
    if (replay.status == 0) {
      check.expect(json::parse(replay.out).at("data").at("match") == true,
                   "CLI replay diverged for seq " + std::to_string(s.seq));
    }
  }
  return check.ok();
}

bool ingestion_round_trip(Check& check) {
  const auto raw = slurp(kFixture);
  const auto parsed = parse_csv(raw);
  const auto repaired = validate_and_repair(parsed);
  check.expect(parsed.size() == 4 && repaired.size() == 4, "expected four regions");

  // Delhi is missing 22-Mar-21: one record is carried forward.
  const auto* dl_raw = parsed.find("DL");
  const auto* dl = repaired.find("DL");
  check.expect(dl_raw && dl && dl->records.size() == dl_raw->records.size() + 1, "gap not filled");
  if (dl) {
    const Date missing = make_date(2021, 3, 22);
    for (std::size_t i = 1; i < dl->records.size(); ++i) {
      if (dl->records[i].date == missing) {
        auto carried = dl->records[i - 1];
        carried.date = missing;
        check.expect(dl->records[i] == carried, "gap record is not the previous day carried forward");
      }
    }
  }
  // Kerala's recovered count dips on 11-Apr-21 and is clamped.
  const auto* kl_raw = parsed.find("KL");
  const auto* kl = repaired.find("KL");
  bool saw_dip = false;
  if (kl_raw && kl) {
    for (std::size_t i = 1; i < kl_raw->records.size(); ++i) {
      if (kl_raw->records[i].recovered < kl_raw->records[i - 1].recovered) {
        saw_dip = true;
        check.expect(kl->records[i].recovered == kl->records[i - 1].recovered, "dip not clamped");
      }
    }
  }
  check.expect(saw_dip, "fixture has no dip to repair");
  for (const auto& s : repaired.series()) check.expect(satisfies_invariants(s), s.region.code + ": invariants");

  const auto once = serialize_csv(repaired);
  const auto reparsed = parse_csv(once, CsvSchema::normalized());
  check.expect(reparsed == repaired, "normalized form does not parse back to the same dataset");
  const auto twice = serialize_csv(validate_and_repair(reparsed));
  check.expect(twice == once, "serialization is not idempotent");

  const auto cli_out = (std::filesystem::temp_directory_path() / "epidss-normalized.csv").string();
  const auto cli = run("ingest '" + kFixture + "' --normalized-out '" + cli_out + "'");
  check.expect(cli.status == 0 && slurp(cli_out) == once, "CLI normalized output differs");
  std::filesystem::remove(cli_out);
  return check.ok();
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);  // repair warnings from the fixture are expected
  struct Criterion {
    const char* name;
    double limit_seconds;  // 0 = no runtime bound
    std::function<bool(Check&)> body;
  };
  const std::vector<Criterion> criteria = {
      {"oxygen fixture: HTTP and CLI awards sum to 3200, each within demand", 1.0, oxygen_fixture},
      {"allocator: 500 random instances match bisection oracle, properties hold", 30.0, allocator_oracle},
      {"forecaster: 200 polynomial series reproduced to 1e-6 for rho 0.5/0.9/1.0", 30.0, forecaster_exactness},
      {"forecaster: fixture 7-day backtest MAPE finite, clamps hold", 10.0, fixture_backtest},
      {"lockdown: 200 random triples match day-scan oracle, monotone", 10.0, lockdown_oracle},
      {"end-to-end: CLI --json equals HTTP bytes, replay reproduces", 0.0, end_to_end},
      {"ingestion: fixture parses, repairs gap and dip, round-trips", 0.0, ingestion_round_trip},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0.0 || seconds < c.limit_seconds;
    ok = ok && check.ok() && in_time;
    failed += ok ? 0 : 1;
    std::printf("%s  %-76s %8.3f s", ok ? "PASS" : "FAIL", c.name, seconds);
    if (c.limit_seconds > 0.0) std::printf(" (limit %.0f s)", c.limit_seconds);
    std::printf("  %s", check.summary().c_str());
    if (!check.extra().empty()) std::printf("  %s", check.extra().c_str());
    if (!in_time) std::printf("  too slow");
    std::printf("\n");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
