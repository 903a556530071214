#include "cabfare/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "cabfare/csv.hpp"
#include "cabfare/error.hpp"

namespace cabfare {

using nlohmann::json;

namespace {

std::string fold(std::string const& s) {
  std::string out = s;
  std::transform(begin(out), end(out), begin(out),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double parse_coord(std::string const& raw, std::string const& where) {
  auto const s = trim_copy(raw);
  double v = 0;
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": malformed coordinate '" + raw + "'");
  }
  return v;
}

}  // namespace

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  for (auto const& e : entries_) {
    if (trim_copy(e.name).empty()) {
      throw ConfigError("gazetteer entry with empty name");
    }
    if (!is_valid(e.location)) {
      throw ConfigError("gazetteer entry '" + e.name + "' has invalid coordinates");
    }
    folded_.push_back(fold(e.name));
  }
}

Gazetteer Gazetteer::from_file(std::string const& path) {
  std::ifstream in{path};
  if (!in) {
    throw ConfigError("cannot open gazetteer '" + path + "'");
  }
  CsvReader reader{in};
  std::vector<std::string> row;
  if (!reader.next(row)) {
    throw ConfigError("gazetteer '" + path + "' is empty");
  }
  std::size_t c_name = 0;
  std::size_t c_lat = 0;
  std::size_t c_lng = 0;
  try {
    CsvHeader const header{row};
    c_name = header.require("name");
    c_lat = header.require("lat");
    c_lng = header.require("lng");
  } catch (InvalidInput const& e) {
    throw ConfigError("gazetteer '" + path + "': " + e.what());
  }
  std::vector<GazetteerEntry> entries;
  while (reader.next(row)) {
    auto const where = path + ":" + std::to_string(reader.line());
    if (row.size() <= std::max({c_name, c_lat, c_lng})) {
      throw ConfigError(where + ": too few columns");
    }
    entries.push_back({trim_copy(row[c_name]),
                       {parse_coord(row[c_lat], where), parse_coord(row[c_lng], where)}});
  }
  try {
    return Gazetteer{std::move(entries)};
  } catch (ConfigError const& e) {
    throw ConfigError("gazetteer '" + path + "': " + e.what());
  }
}

std::vector<GazetteerEntry> Gazetteer::search(std::string const& query,
                                              std::size_t limit) const {
  auto const q = fold(trim_copy(query));
  if (q.empty()) {
    throw InvalidInput("geocode query must not be empty");
  }
  struct Hit {
    std::size_t pos;
    std::size_t index;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < folded_.size(); ++i) {
    if (auto const pos = folded_[i].find(q); pos != std::string::npos) {
      hits.push_back({pos, i});
    }
  }
  std::sort(begin(hits), end(hits), [&](Hit const& a, Hit const& b) {
    auto const& na = entries_[a.index].name;
    auto const& nb = entries_[b.index].name;
    return std::tuple{a.pos, na.size(), na, a.index} <
           std::tuple{b.pos, nb.size(), nb, b.index};
  });
  std::vector<GazetteerEntry> out;
  for (std::size_t i = 0; i < hits.size() && i < limit; ++i) {
    out.push_back(entries_[hits[i].index]);
  }
  return out;
}

std::string to_string(ProviderKind k) {
  return k == ProviderKind::metered ? "metered" : "flex";
}

// ---------------------------------------------------------------------------

namespace {

struct Loader {
  std::filesystem::path dir;

  std::string resolve(json const& j, char const* key, std::string const& ctx) const {
    return (dir / str(j, key, ctx)).string();
  }

  static std::string str(json const& j, char const* key, std::string const& ctx) {
    if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
      throw ConfigError(ctx + ": missing string field '" + key + "'");
    }
    return j[key].get<std::string>();
  }

  static double num(json const& j, char const* key, double fallback,
                    std::string const& ctx) {
    if (!j.contains(key)) {
      return fallback;
    }
    if (!j[key].is_number()) {
      throw ConfigError(ctx + ": field '" + key + "' must be a number");
    }
    return j[key].get<double>();
  }

  ProviderInfo info(json const& j, ProviderKind kind, std::string const& ctx) const {
    ProviderInfo p;
    p.id = str(j, "id", ctx);
    p.name = j.value("name", p.id);
    p.short_name = j.value("short_name", p.name);
    p.color = j.value("color", std::string{"#444444"});
    p.kind = kind;
    return p;
  }

  std::shared_ptr<RoutingProvider const> router(json const& j, std::string const& ctx) const {
    auto const type = str(j, "type", ctx);
    std::shared_ptr<RoutingProvider const> r;
    if (type == "fixture") {
      r = std::make_shared<FixtureRouter>(FixtureRouter::from_file(resolve(j, "path", ctx)));
    } else if (type == "synthetic") {
      r = std::make_shared<SyntheticRouter>(num(j, "speed_mps", 8.0, ctx));
    } else if (type == "http") {
      auto const timeout_ms = num(j, "timeout_ms", 5000, ctx);
      r = std::make_shared<HttpRouter>(
          str(j, "base_url", ctx),
          std::chrono::milliseconds{static_cast<std::int64_t>(timeout_ms)});
    } else {
      throw ConfigError(ctx + ": unknown routing type '" + type + "'");
    }
    if (j.contains("fallback")) {
      r = std::make_shared<FallbackRouter>(
          std::move(r), router(j["fallback"], ctx + ".fallback"));
    }
    return r;
  }

  CityConfig city(json const& j) const {
    if (!j.is_object()) {
      throw ConfigError("cities.json: every city must be an object");
    }
    CityConfig c;
    c.code = str(j, "code", "cities.json");
    auto const ctx = "city '" + c.code + "'";
    c.name = j.value("name", c.code);
    c.currency = str(j, "currency", ctx);
    for (auto const* key : {"metered", "flex", "routing", "gazetteer"}) {
      if (!j.contains(key)) {
        throw ConfigError(ctx + ": missing '" + key + "'");
      }
    }

    auto const& mj = j["metered"];
    auto const mctx = ctx + ".metered";
    c.metered = info(mj, ProviderKind::metered, mctx);
    TariffScheme scheme;
    try {
      scheme = load_tariff(resolve(mj, "tariff", mctx));
    } catch (InvalidScheme const& e) {
      throw ConfigError(mctx + ": " + e.what());
    }
    if (scheme.currency != c.currency) {
      throw ConfigError(mctx + ": tariff currency " + scheme.currency + " != " + c.currency);
    }
    std::shared_ptr<TripStore const> history;
    if (mj.contains("history")) {
      c.history_path = resolve(mj, "history", mctx);
      std::error_code ec;
      if (std::filesystem::exists(c.history_path, ec)) {
        try {
          history = std::make_shared<TripStore const>(
              ingest_trips_file(c.history_path.string(), c.currency).store);
        } catch (Error const& e) {
          throw ConfigError(mctx + ": history '" + c.history_path.string() + "': " +
                            e.what());
        }
      }
    } else {
      c.history_path = dir / "trips" / (c.code + ".csv");
    }
    auto const vicinity = num(mj, "vicinity_m", kDefaultVicinityM, mctx);

    auto const& fj = j["flex"];
    auto const fctx = ctx + ".flex";
    c.flex = info(fj, ProviderKind::flex, fctx);
    if (c.flex.id == c.metered.id) {
      throw ConfigError(ctx + ": provider ids must differ");
    }
    std::shared_ptr<PriceProvider const> flex;
    if (fj.contains("quotes")) {
      flex = std::make_shared<RangeQuoteProvider>(
          RangeQuoteProvider::from_file(c.flex.id, c.currency, resolve(fj, "quotes", fctx)));
    } else {
      auto const model = load_flex_model(resolve(fj, "model", fctx));
      if (model.currency != c.currency) {
        throw ConfigError(fctx + ": model currency " + model.currency + " != " + c.currency);
      }
      try {
        flex = std::make_shared<FlexProvider>(c.flex.id, model,
                                              SurgeState{num(fj, "surge", 1.0, fctx)});
      } catch (InvalidInput const& e) {
        throw ConfigError(fctx + ": " + e.what());
      }
    }

    c.pricing.city = c.code;
    c.pricing.currency = c.currency;
    c.pricing.router = router(j["routing"], ctx + ".routing");
    c.pricing.providers = {
        std::make_shared<MeteredProvider>(c.metered.id, std::move(scheme), history, vicinity),
        std::move(flex)};
    c.gazetteer = Gazetteer::from_file(resolve(j, "gazetteer", ctx));
    return c;
  }
};

}  // namespace

Config::Config(std::vector<CityConfig> cities) : cities_(std::move(cities)) {
  std::set<std::string> codes;
  for (auto const& c : cities_) {
    if (!codes.insert(c.code).second) {
      throw ConfigError("duplicate city code '" + c.code + "'");
    }
  }
}

Config Config::load(std::filesystem::path const& dir) {
  auto const file = dir / "cities.json";
  std::ifstream in{file};
  if (!in) {
    throw ConfigError("cannot open '" + file.string() + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (json::exception const& e) {
    throw ConfigError("'" + file.string() + "': " + e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw ConfigError("'" + file.string() + "' must be a non-empty array of cities");
  }
  Loader const loader{dir};
  std::vector<CityConfig> cities;
  for (auto const& cj : j) {
    try {
      cities.push_back(loader.city(cj));
    } catch (ConfigError const&) {
      throw;
    } catch (json::exception const& e) {
      throw ConfigError("'" + file.string() + "': " + e.what());
    }
  }
  Config cfg{std::move(cities)};
  cfg.dir_ = dir;
  return cfg;
}

CityConfig const& Config::city(std::string const& code) const {
  for (auto const& c : cities_) {
    if (c.code == code) {
      return c;
    }
  }
  throw UnknownCity("unknown city '" + code + "'");
}

}  // namespace cabfare
