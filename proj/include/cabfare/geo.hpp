#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cabfare {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;
  double lng = 0.0;

  friend bool operator==(GeoPoint const&, GeoPoint const&) = default;
};

bool is_valid(GeoPoint const& p) noexcept;

/// Throws InvalidInput naming the offending coordinate.
void validate(GeoPoint const& p);

/// Parses "lat,lng" (whitespace tolerated). Throws InvalidInput.
GeoPoint parse_geo_point(std::string const& text);

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine(GeoPoint const& a, GeoPoint const& b) noexcept;

/// Immutable uniform lat/lng grid. Cells are square in degrees, sized so a
/// cell spans `cell_size_m` of latitude; radius queries visit the cells
/// overlapping the query's bounding box and post-filter on haversine.
class SpatialIndex {
 public:
  struct Entry {
    GeoPoint point;
    std::size_t id;
  };

  SpatialIndex() : SpatialIndex(std::vector<Entry>{}) {}
  explicit SpatialIndex(std::vector<Entry> entries, double cell_size_m = 100.0);

  /// Indexes `points` with ids equal to their positions.
  static SpatialIndex from_points(std::span<GeoPoint const> points,
                                  double cell_size_m = 100.0);

  /// Ids of every entry with haversine(point, center) <= radius_m, ascending.
  std::vector<std::size_t> radius_query(GeoPoint const& center,
                                        double radius_m) const;

  std::size_t count_within(GeoPoint const& center, double radius_m) const;

  std::size_t size() const noexcept { return entries_.size(); }
  double cell_size_m() const noexcept { return cell_size_m_; }
  std::vector<Entry> const& entries() const noexcept { return entries_; }

 private:
  template <typename Visit>
  void for_each_candidate(GeoPoint const& center, double radius_m,
                          Visit&& visit) const;

  std::int64_t lat_cell(double lat) const noexcept;
  std::int64_t lng_cell(double lng) const noexcept;
  static std::uint64_t key(std::int64_t lat_cell, std::int64_t lng_cell) noexcept;

  double cell_size_m_;
  double cell_deg_;
  std::int64_t lng_cells_;
  std::vector<Entry> entries_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace cabfare
