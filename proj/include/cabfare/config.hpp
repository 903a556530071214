#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cabfare/comparison.hpp"
#include "cabfare/geo.hpp"

namespace cabfare {

struct GazetteerEntry {
  std::string name;
  GeoPoint location;
};

/// Free-text place lookup: case-insensitive substring match ranked by match
/// position, then name length, then name.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(std::vector<GazetteerEntry> entries);

  /// CSV with header name,lat,lng. Throws ConfigError.
  static Gazetteer from_file(std::string const& path);

  /// Throws InvalidInput for an empty (or all-blank) query.
  std::vector<GazetteerEntry> search(std::string const& query,
                                     std::size_t limit = 5) const;

  std::vector<GazetteerEntry> const& entries() const noexcept { return entries_; }

 private:
  std::vector<GazetteerEntry> entries_;
  std::vector<std::string> folded_;
};

enum class ProviderKind { metered, flex };

struct ProviderInfo {
  std::string id;
  std::string name;
  std::string short_name;
  std::string color;
  ProviderKind kind = ProviderKind::metered;
};

struct CityConfig {
  std::string code;
  std::string name;
  std::string currency;
  ProviderInfo metered;
  ProviderInfo flex;
  CityPricing pricing;
  Gazetteer gazetteer;
  /// Where ingest-trips --save writes the metered provider's history.
  std::filesystem::path history_path;
};

/// Every city of a configuration directory, resolved and validated at load.
///
/// Layout: <dir>/cities.json is an array of city objects
///   {code, name, currency,
///    metered: {id, name, short_name, color, tariff, history?, vicinity_m?},
///    flex:    {id, name, short_name, color, model | quotes, surge?},
///    routing: {type: fixture|synthetic|http, ..., fallback?},
///    gazetteer}
/// with file references relative to <dir>.
class Config {
 public:
  /// Throws ConfigError naming the offending file or field.
  static Config load(std::filesystem::path const& dir);

  explicit Config(std::vector<CityConfig> cities);

  /// Throws UnknownCity.
  CityConfig const& city(std::string const& code) const;
  std::vector<CityConfig> const& cities() const noexcept { return cities_; }
  std::filesystem::path const& dir() const noexcept { return dir_; }

 private:
  std::vector<CityConfig> cities_;
  std::filesystem::path dir_;
};

std::string to_string(ProviderKind k);

}  // namespace cabfare
