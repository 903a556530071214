#include "cabfare/cli.hpp"

#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include "cabfare/analysis.hpp"
#include "cabfare/engine.hpp"
#include "cabfare/service.hpp"

namespace cabfare {

using nlohmann::json;

namespace {

std::string default_config_dir() {
  if (auto const* env = std::getenv("CABFARE_CONFIG_DIR"); env && *env) {
    return env;
  }
  return "config";
}

struct EstimateArgs {
  std::string city;
  std::string from;
  std::string to;
  std::string time;
  std::optional<double> surge;
  std::string user;
  bool json = false;
};

void print_estimate(std::ostream& out, json const& body, CityConfig const& city) {
  auto const name_of = [&](std::string const& id) {
    if (id == city.metered.id) {
      return city.metered.name;
    }
    if (id == city.flex.id) {
      return city.flex.name;
    }
    return id;
  };
  auto const currency = body["currency"].get<std::string>();
  out << city.name << "  " << body["submitted_at"].get<std::string>() << "\n";
  for (auto const& e : body["estimates"]) {
    auto method = e["method"].get<std::string>();
    if (e["corrected"].get<bool>()) {
      method += ", corrected";
    }
    if (e["surge_multiplier"].get<double>() != 1.0) {
      std::ostringstream s;
      s << ", surge x" << e["surge_multiplier"].get<double>();
      method += s.str();
    }
    out << "  " << std::left << std::setw(16) << name_of(e["provider"].get<std::string>())
        << std::right << std::setw(10) << e["amount"].get<std::string>() << ' ' << currency
        << "  (" << method << ")\n";
  }
  out << "winner:  " << name_of(body["winner"].get<std::string>()) << "\n"
      << "savings: " << body["savings"].get<std::string>() << ' ' << currency << "\n"
      << "query:   " << body["query_id"].get<std::string>() << "\n";
}

int cmd_estimate(EstimateArgs const& a, std::string const& config_dir,
                 std::string const& log_path, std::ostream& out) {
  EngineOptions options;
  if (!log_path.empty()) {
    options.log_path = log_path;
  }
  Engine engine{Config::load(config_dir), std::move(options)};
  auto const from = parse_geo_point(a.from);
  auto const to = parse_geo_point(a.to);
  json request{{"city", a.city},
               {"origin", {{"lat", from.lat}, {"lng", from.lng}}},
               {"destination", {{"lat", to.lat}, {"lng", to.lng}}}};
  if (!a.time.empty()) {
    request["time"] = a.time;
  }
  if (a.surge) {
    request["surge_multiplier"] = *a.surge;
  }
  if (!a.user.empty()) {
    request["user_id"] = a.user;
  }
  auto const body = engine.estimate(request);
  if (a.json) {
    out << body.dump() << "\n";
  } else {
    print_estimate(out, body, engine.config().city(a.city));
  }
  return 0;
}

int cmd_ingest(std::string const& city_code, std::string const& file, bool save,
               std::string const& config_dir, std::ostream& out) {
  auto const config = Config::load(config_dir);
  auto const& city = config.city(city_code);
  auto const result = ingest_trips_file(file, city.currency);
  out << "accepted " << result.accepted() << ", rejected " << result.rejected.size() << "\n";
  for (auto const& r : result.rejected) {
    out << "  line " << r.line << ": " << r.reason << "\n";
  }
  if (save) {
    std::vector<HistoricTrip> trips;
    std::error_code ec;
    if (std::filesystem::exists(city.history_path, ec)) {
      trips = ingest_trips_file(city.history_path.string(), city.currency).store.trips();
    }
    auto const& added = result.store.trips();
    trips.insert(trips.end(), added.begin(), added.end());
    std::filesystem::create_directories(city.history_path.parent_path(), ec);
    auto const tmp = city.history_path.string() + ".tmp";
    {
      std::ofstream f{tmp, std::ios::trunc};
      if (!f) {
        throw StorageFailure("cannot write '" + tmp + "'");
      }
      write_trips_csv(f, trips);
      if (!f.flush()) {
        throw StorageFailure("cannot write '" + tmp + "'");
      }
    }
    std::filesystem::rename(tmp, city.history_path, ec);
    if (ec) {
      throw StorageFailure("cannot replace '" + city.history_path.string() +
                           "': " + ec.message());
    }
    out << "saved " << trips.size() << " trips to " << city.history_path.string() << "\n";
  }
  return 0;
}

struct AnalyzeArgs {
  std::string rides;
  std::string trajectories;
  std::string places;
  std::string out;
  AnalysisOptions options;
};

int cmd_analyze(AnalyzeArgs const& a, std::ostream& out) {
  auto const report =
      analyze_experiment_files(a.rides, a.trajectories, a.places, a.options);
  auto const doc = to_json(report).dump(2) + "\n";
  if (a.out.empty() || a.out == "-") {
    out << doc;
    return 0;
  }
  std::ofstream f{a.out, std::ios::trunc};
  if (!f || !(f << doc) || !f.flush()) {
    throw StorageFailure("cannot write report '" + a.out + "'");
  }
  out << std::fixed << std::setprecision(2) << "journeys " << report.journeys.size()
      << ": wins " << report.wins << ", ties " << report.ties << ", losses "
      << report.losses << "; mean duration " << report.mean_metered_min << " / "
      << report.mean_flex_min << " min\nreport written to " << a.out << "\n";
  return 0;
}

int cmd_serve(std::string const& config_dir, std::string const& host, int port,
              std::string const& log_path, std::string const& static_dir,
              std::ostream& out, std::ostream& err) {
  EngineOptions options;
  options.log_path = log_path;
  Engine engine{Config::load(config_dir), std::move(options)};
  Service service{engine};
  if (!static_dir.empty() && !service.mount_static(static_dir)) {
    throw ConfigError("static directory '" + static_dir + "' does not exist");
  }

  // Handle termination signals synchronously on this thread; server
  // threads inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  bool ok = true;
  std::thread server{[&] { ok = service.listen(host, port); }};
  std::thread waiter{[&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  }};
  out << "listening on " << host << ":" << port << " (" << engine.query_log().size()
      << " queries replayed from " << log_path << ")" << std::endl;
  server.join();
  if (!ok) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    err << "error: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  waiter.join();
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Taxi and ride-hailing fare estimation and comparison", "cabfare"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_dir = default_config_dir();
  std::string log_path;
  app.add_option("--config-dir", config_dir, "Configuration directory");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Compare provider fares for a journey");
  estimate->add_option("--city", est.city, "City code")->required();
  estimate->add_option("--from", est.from, "Origin as lat,lng")->required();
  estimate->add_option("--to", est.to, "Destination as lat,lng")->required();
  estimate->add_option("--time", est.time, "Departure time (RFC 3339); default now");
  estimate->add_option("--surge", est.surge, "Surge multiplier for the flex provider");
  estimate->add_option("--user", est.user, "User id recorded with the query");
  estimate->add_option("--log-path", log_path, "Append the result to this query log");
  estimate->add_flag("--json", est.json, "Print the service response body");

  std::string ingest_city;
  std::string ingest_file;
  bool ingest_save = false;
  auto* ingest = app.add_subcommand("ingest-trips", "Load a historic trip CSV");
  ingest->add_option("--city", ingest_city, "City code")->required();
  ingest->add_option("--file", ingest_file, "Trip CSV")->required();
  ingest->add_flag("--save", ingest_save, "Add accepted trips to the city's history");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze-experiment", "Analyse a paired-ride experiment");
  analyze->add_option("--rides", an.rides, "Rides CSV")->required();
  analyze->add_option("--trajectories", an.trajectories, "Trajectory CSV")->required();
  analyze->add_option("--places", an.places, "Places CSV")->required();
  analyze->add_option("--tie-tolerance", an.options.tie_tolerance_s,
                      "Duration difference (s) counted as a tie")
      ->check(CLI::NonNegativeNumber);
  analyze->add_option("--radius", an.options.density_radius_m, "Density radius (m)")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--metered", an.options.metered_provider, "Metered provider id");
  analyze->add_option("--flex", an.options.flex_provider, "Flex provider id");
  analyze->add_option("--out", an.out, "Report path (stdout if omitted)");

  std::string host = "0.0.0.0";
  int port = 8080;
  std::string serve_log = "var/queries.ndjson";
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--log-path", serve_log, "Query log file");
  serve->add_option("--static-dir", static_dir, "Serve a built web client from here");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (CLI::ParseError const& e) {
    auto const code = app.exit(e, out, err);
    return code == 0 ? 0 : 3;
  }

  try {
    if (*estimate) {
      return cmd_estimate(est, config_dir, log_path, out);
    }
    if (*ingest) {
      return cmd_ingest(ingest_city, ingest_file, ingest_save, config_dir, out);
    }
    if (*analyze) {
      return cmd_analyze(an, out);
    }
    return cmd_serve(config_dir, host, port, serve_log, static_dir, out, err);
  } catch (Error const& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (std::exception const& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cabfare
