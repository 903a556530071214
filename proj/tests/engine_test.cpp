#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "cabfare/cli.hpp"
#include "cabfare/engine.hpp"
#include "cabfare/error.hpp"
#include "cabfare/service.hpp"

using namespace cabfare;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path const kConfig = CABFARE_TEST_CONFIG_DIR;
fs::path const kExperiment = CABFARE_TEST_EXPERIMENT_DIR;

json reference_body() {
  return {{"city", "london"},
          {"origin", {{"lat", 51.50}, {"lng", -0.12}}},
          {"destination", {{"lat", 51.51}, {"lng", -0.10}}},
          {"time", "2026-03-10T12:00:00Z"},
          {"user_id", "u1"}};
}

EngineOptions fixed_clock(std::optional<fs::path> log = std::nullopt) {
  EngineOptions o;
  o.log_path = std::move(log);
  o.clock = [] { return parse_rfc3339("2026-03-10T12:30:00Z"); };
  return o;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), {"--config-dir", kConfig.string()});
  std::ostringstream out;
  std::ostringstream err;
  auto const code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(std::string const& name) {
  auto const p = fs::temp_directory_path() / ("cabfare-engine-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, LoadsBundledCities) {
  auto const c = Config::load(kConfig);
  ASSERT_EQ(c.cities().size(), 2u);
  EXPECT_EQ(c.city("london").currency, "GBP");
  EXPECT_EQ(c.city("new_york").metered.id, "yellow_cab");
  EXPECT_THROW(c.city("paris"), UnknownCity);
  EXPECT_THROW(Config::load("/nonexistent"), ConfigError);
}

TEST(Gazetteer, RankedSubstringSearch) {
  auto const c = Config::load(kConfig);
  auto const& g = c.city("london").gazetteer;
  auto const t = g.search("trafalgar");
  ASSERT_FALSE(t.empty());
  EXPECT_EQ(t[0].name, "Trafalgar Square");
  auto const s = g.search("s");
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s[0].name, "Strand");
  EXPECT_TRUE(g.search("zzz").empty());
  EXPECT_THROW(g.search("  "), InvalidInput);
}

TEST(Engine, ReferenceQuery) {
  Engine engine{Config::load(kConfig), fixed_clock()};
  auto const r = engine.estimate(reference_body());
  ASSERT_EQ(r["estimates"].size(), 2u);
  EXPECT_EQ(r["estimates"][0]["provider"], "black_cab");
  EXPECT_EQ(r["estimates"][0]["amount"], "4.86");
  EXPECT_EQ(r["estimates"][0]["corrected"], true);
  EXPECT_EQ(r["estimates"][1]["amount"], "5.00");
  EXPECT_EQ(r["winner"], "black_cab");
  EXPECT_EQ(r["savings"], "0.14");
  EXPECT_EQ(engine.query_log().size(), 1u);
}

TEST(Engine, OriginEqualsDestinationIsMinimumFare) {
  Engine engine{Config::load(kConfig), fixed_clock()};
  auto body = reference_body();
  body["destination"] = body["origin"];
  auto const r = engine.estimate(body);
  EXPECT_EQ(r["estimates"][0]["amount_minor"], 240);
  EXPECT_EQ(r["estimates"][1]["amount_minor"], 500);
}

TEST(Engine, RequestValidation) {
  Engine engine{Config::load(kConfig), fixed_clock()};
  auto body = reference_body();
  body.erase("time");
  EXPECT_EQ(engine.estimate(body)["submitted_at"], "2026-03-10T12:30:00Z");
  auto bad = reference_body();
  bad["origin"]["lat"] = 95;
  EXPECT_THROW(engine.estimate(bad), InvalidInput);
  bad = reference_body();
  bad["city"] = "paris";
  EXPECT_THROW(engine.estimate(bad), UnknownCity);
  bad = reference_body();
  bad["surge_multiplier"] = 0.5;
  EXPECT_THROW(engine.estimate(bad), InvalidInput);
  EXPECT_THROW(engine.estimate(json::array()), InvalidInput);
  EXPECT_EQ(engine.query_log().size(), 1u);
}

TEST(Engine, SurgeOverrideAppliesToFlexOnly) {
  Engine engine{Config::load(kConfig), fixed_clock()};
  auto body = reference_body();
  body["surge_multiplier"] = 3.0;
  auto const r = engine.estimate(body);
  EXPECT_EQ(r["estimates"][0]["amount"], "4.86");
  EXPECT_EQ(r["estimates"][1]["surge_multiplier"], 3.0);
  // 3 * (15 * 6 min + 125 * 2000 m / mile) = 736.03
  EXPECT_EQ(r["estimates"][1]["amount_minor"], 736);
}

TEST(Engine, FeedbackAndSavings) {
  auto const dir = scratch("feedback");
  Engine engine{Config::load(kConfig), fixed_clock(dir / "q.ndjson")};
  auto const r = engine.estimate(reference_body());
  auto const fb = engine.submit_feedback(
      {{"text", "fare was higher"}, {"query_id", r["query_id"]}, {"actual_fare", "5.20"}});
  EXPECT_EQ(fb["deviation"], "0.34");
  EXPECT_EQ(fb["provider"], "black_cab");
  EXPECT_TRUE(fs::exists(dir / "q.feedback.ndjson"));
  EXPECT_THROW(engine.submit_feedback({{"text", ""}}), InvalidInput);
  EXPECT_EQ(engine.feedback().size(), 1u);

  auto const s = engine.savings("london", "", "");
  EXPECT_EQ(s["query_count"], 1);
  EXPECT_EQ(s["mean_savings"], "0.14");
  EXPECT_EQ(engine.savings("london", "2026-03-11T00:00:00Z", "")["query_count"], 0);
  EXPECT_THROW(engine.savings("paris", "", ""), UnknownCity);
  fs::remove_all(dir);
}

TEST(ErrorMapping, StatusAndExitCodes) {
  EXPECT_EQ(http_status(InvalidInput{"x"}), 400);
  EXPECT_EQ(http_status(UnknownCity{"x"}), 404);
  EXPECT_EQ(http_status(RouteNotFound{"x"}), 422);
  EXPECT_EQ(http_status(ProviderUnavailable{"x"}), 502);
  EXPECT_EQ(http_status(StorageFailure{"x"}), 500);
  EXPECT_EQ(exit_code(ConfigError{"x"}), 1);
  EXPECT_EQ(exit_code(RouteNotFound{"x"}), 2);
  EXPECT_EQ(exit_code(InvalidInput{"x"}), 3);
  EXPECT_EQ(error_body(UnknownCity{"no"}), (json{{"error", "UnknownCity"}, {"message", "no"}}));
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    engine_ = std::make_unique<Engine>(Config::load(kConfig), fixed_clock());
    service_ = std::make_unique<Service>(*engine_);
    port_ = service_->bind_any("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread{[this] { service_->run(); }};
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 200 && !client_->Get("/healthz"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds{5});
    }
  }
  void TearDown() override {
    service_->stop();
    thread_.join();
  }

  std::unique_ptr<Engine> engine_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServiceTest, Endpoints) {
  auto const est = client_->Post("/api/v1/estimate", reference_body().dump(), "application/json");
  ASSERT_TRUE(est);
  EXPECT_EQ(est->status, 200);
  EXPECT_EQ(json::parse(est->body)["winner"], "black_cab");

  auto const geo = client_->Get("/api/v1/geocode?city=london&q=trafalgar");
  ASSERT_TRUE(geo);
  EXPECT_EQ(geo->status, 200);
  EXPECT_EQ(json::parse(geo->body)[0]["name"], "Trafalgar Square");

  auto const unknown = client_->Get("/api/v1/geocode?city=paris&q=x");
  ASSERT_TRUE(unknown);
  EXPECT_EQ(unknown->status, 404);
  EXPECT_EQ(json::parse(unknown->body)["error"], "UnknownCity");

  auto const malformed = client_->Post("/api/v1/estimate", "{nope", "application/json");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 400);

  auto const cities = client_->Get("/api/v1/cities");
  ASSERT_TRUE(cities);
  auto const cj = json::parse(cities->body);
  ASSERT_EQ(cj.size(), 2u);
  EXPECT_EQ(cj[0]["providers"][0]["color"], "#111111");

  auto const fb = client_->Post("/api/v1/feedback", json{{"text", "hi"}}.dump(),
                                "application/json");
  ASSERT_TRUE(fb);
  EXPECT_EQ(fb->status, 201);
  auto const list = client_->Get("/api/v1/feedback");
  ASSERT_TRUE(list);
  EXPECT_EQ(json::parse(list->body).size(), 1u);

  auto const stats = client_->Get("/api/v1/stats/savings?city=london");
  ASSERT_TRUE(stats);
  EXPECT_EQ(json::parse(stats->body)["query_count"], 1);
}

TEST(Cli, EstimateMatchesEngineBody) {
  auto const r = cli({"estimate", "--city", "london", "--from", "51.50,-0.12", "--to",
                      "51.51,-0.10", "--time", "2026-03-10T12:00:00Z", "--user", "u1",
                      "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  Engine engine{Config::load(kConfig), fixed_clock()};
  EXPECT_EQ(r.out, engine.estimate(reference_body()).dump() + "\n");

  auto const table = cli({"estimate", "--city", "london", "--from", "51.50,-0.12", "--to",
                          "51.51,-0.10", "--time", "2026-03-10T12:00:00Z"});
  ASSERT_EQ(table.code, 0) << table.err;
  EXPECT_NE(table.out.find("4.86"), std::string::npos) << table.out;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"estimate", "--city", "london", "--from", "abc", "--to", "51.51,-0.10"}).code,
            3);
  EXPECT_EQ(cli({"estimate", "--city", "paris", "--from", "1,1", "--to", "2,2"}).code, 3);
  EXPECT_EQ(cli({"bogus"}).code, 3);
  auto const missing = cli({"analyze-experiment", "--rides", "nope.csv", "--trajectories",
                            "nope.csv", "--places", "nope.csv"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("nope.csv"), std::string::npos);
  std::vector<std::string> bad_config{"--config-dir", "/nonexistent", "estimate", "--city",
                                      "london", "--from", "1,1", "--to", "2,2"};
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(run_cli(bad_config, out, err), 1);
}

TEST(Cli, IngestTrips) {
  auto const dir = scratch("ingest");
  auto const csv = dir / "trips.csv";
  std::ofstream{csv}
      << "pickup_datetime,pickup_lat,pickup_lng,dropoff_lat,dropoff_lng,fare_amount\n"
         "2015-03-01T01:50:00Z,40.73,-73.99,40.77,-73.87,25.52\n"
         "2015-03-01T02:50:00Z,40.74,-73.99,40.77,-73.87,12.00\n"
         "2015-03-01T03:50:00Z,40.75,-73.99,40.77,-73.87,8.75\n";
  auto const ok = cli({"ingest-trips", "--city", "new_york", "--file", csv.string()});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.out, "accepted 3, rejected 0\n");

  std::ofstream{csv, std::ios::app} << "x,y,z,1,1,1\n";
  auto const some = cli({"ingest-trips", "--city", "new_york", "--file", csv.string()});
  EXPECT_EQ(some.code, 0);
  EXPECT_EQ(some.out, "accepted 3, rejected 1\n  line 5: malformed coordinate\n");
  fs::remove_all(dir);
}

TEST(Cli, AnalyzeExperiment) {
  auto const r = cli({"analyze-experiment", "--rides", (kExperiment / "rides.csv").string(),
                      "--trajectories", (kExperiment / "trajectories.csv").string(), "--places",
                      (kExperiment / "places.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto const j = json::parse(r.out);
  EXPECT_EQ(j["outcomes"]["wins"], 18);
  EXPECT_EQ(j["outcomes"]["ties"], 4);
  EXPECT_EQ(j["outcomes"]["losses"], 7);
  EXPECT_EQ(j["gains"].size(), 29u);
}
