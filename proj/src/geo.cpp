#include "cabfare/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cabfare/error.hpp"

namespace cabfare {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::string trim(std::string_view s) {
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) {
    return {};
  }
  auto const e = s.find_last_not_of(" \t\r\n");
  return std::string{s.substr(b, e - b + 1)};
}

bool parse_double(std::string const& s, double& out) {
  if (s.empty()) {
    return false;
  }
  auto const* first = s.data();
  auto const* last = s.data() + s.size();
  if (*first == '+') {
    ++first;
  }
  auto const [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

bool is_valid(GeoPoint const& p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lng) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lng >= -180.0 && p.lng <= 180.0;
}

void validate(GeoPoint const& p) {
  if (!std::isfinite(p.lat) || p.lat < -90.0 || p.lat > 90.0) {
    throw InvalidInput("lat out of range");
  }
  if (!std::isfinite(p.lng) || p.lng < -180.0 || p.lng > 180.0) {
    throw InvalidInput("lng out of range");
  }
}

GeoPoint parse_geo_point(std::string const& text) {
  auto const comma = text.find(',');
  if (comma == std::string::npos) {
    throw InvalidInput("malformed coordinate '" + text +
                       "': expected <lat,lng>");
  }
  GeoPoint p;
  if (!parse_double(trim(std::string_view{text}.substr(0, comma)), p.lat) ||
      !parse_double(trim(std::string_view{text}.substr(comma + 1)), p.lng)) {
    throw InvalidInput("malformed coordinate '" + text +
                       "': expected <lat,lng>");
  }
  validate(p);
  return p;
}

double haversine(GeoPoint const& a, GeoPoint const& b) noexcept {
  auto const phi1 = a.lat * kDegToRad;
  auto const phi2 = b.lat * kDegToRad;
  auto const dphi = (b.lat - a.lat) * kDegToRad;
  auto const dlambda = (b.lng - a.lng) * kDegToRad;
  auto const s1 = std::sin(dphi / 2.0);
  auto const s2 = std::sin(dlambda / 2.0);
  auto const h =
      std::min(1.0, s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

// ---------------------------------------------------------------------------

SpatialIndex::SpatialIndex(std::vector<Entry> entries, double cell_size_m)
    : cell_size_m_(cell_size_m), entries_(std::move(entries)) {
  if (!(cell_size_m_ > 0.0) || !std::isfinite(cell_size_m_)) {
    throw InvalidInput("cell_size_m must be positive");
  }
  // Whole number of cells around the globe so longitude wrap-around is exact.
  lng_cells_ = static_cast<std::int64_t>(
      std::ceil(360.0 / (cell_size_m_ / (kEarthRadiusM * kDegToRad))));
  cell_deg_ = 360.0 / static_cast<double>(lng_cells_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    validate(entries_[i].point);
    cells_[key(lat_cell(entries_[i].point.lat), lng_cell(entries_[i].point.lng))]
        .push_back(i);
  }
}

SpatialIndex SpatialIndex::from_points(std::span<GeoPoint const> points,
                                       double cell_size_m) {
  std::vector<Entry> entries;
  entries.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    entries.push_back({points[i], i});
  }
  return SpatialIndex{std::move(entries), cell_size_m};
}

std::int64_t SpatialIndex::lat_cell(double lat) const noexcept {
  return static_cast<std::int64_t>(std::floor((lat + 90.0) / cell_deg_));
}

std::int64_t SpatialIndex::lng_cell(double lng) const noexcept {
  auto const c = static_cast<std::int64_t>(std::floor((lng + 180.0) / cell_deg_));
  return ((c % lng_cells_) + lng_cells_) % lng_cells_;
}

std::uint64_t SpatialIndex::key(std::int64_t lat_cell,
                                std::int64_t lng_cell) noexcept {
  return (static_cast<std::uint64_t>(lat_cell) << 32U) ^
         static_cast<std::uint64_t>(lng_cell & 0xffffffff);
}

template <typename Visit>
void SpatialIndex::for_each_candidate(GeoPoint const& center, double radius_m,
                                      Visit&& visit) const {
  if (entries_.empty() || !(radius_m >= 0.0)) {
    return;
  }
  auto const delta = radius_m / kEarthRadiusM;  // angular radius
  auto const dlat = delta * kRadToDeg;
  // One-cell margin on every side absorbs floor() rounding at cell edges.
  auto const lat_lo = lat_cell(std::max(-90.0, center.lat - dlat)) - 1;
  auto const lat_hi = lat_cell(std::min(90.0, center.lat + dlat)) + 1;

  // Longitude half-width of the spherical cap; full circle near the poles.
  auto const cos_lat = std::cos(center.lat * kDegToRad);
  auto const sin_delta = std::sin(std::min(delta, std::numbers::pi / 2.0));
  bool full_lng = delta >= std::numbers::pi / 2.0 || sin_delta >= cos_lat;
  double dlng = 0.0;
  if (!full_lng) {
    dlng = std::asin(sin_delta / cos_lat) * kRadToDeg + 1e-9;
    full_lng = dlng >= 180.0;
  }

  std::int64_t lng_lo = 0;
  std::int64_t lng_span = lng_cells_;
  if (!full_lng) {
    lng_lo = static_cast<std::int64_t>(
        std::floor((center.lng - dlng + 180.0) / cell_deg_)) - 1;
    auto const lng_hi = static_cast<std::int64_t>(
        std::floor((center.lng + dlng + 180.0) / cell_deg_)) + 1;
    lng_span = std::min(lng_hi - lng_lo + 1, lng_cells_);
  }

  // Huge radii touch more cells than there are entries: scan instead.
  if (static_cast<double>(lat_hi - lat_lo + 1) * static_cast<double>(lng_span) >
      static_cast<double>(entries_.size())) {
    for (auto const& e : entries_) {
      if (haversine(e.point, center) <= radius_m) {
        visit(e);
      }
    }
    return;
  }

  for (auto la = lat_lo; la <= lat_hi; ++la) {
    for (std::int64_t k = 0; k < lng_span; ++k) {
      auto const ln = (((lng_lo + k) % lng_cells_) + lng_cells_) % lng_cells_;
      auto const it = cells_.find(key(la, ln));
      if (it == cells_.end()) {
        continue;
      }
      for (auto const idx : it->second) {
        auto const& e = entries_[idx];
        if (haversine(e.point, center) <= radius_m) {
          visit(e);
        }
      }
    }
  }
}

std::vector<std::size_t> SpatialIndex::radius_query(GeoPoint const& center,
                                                    double radius_m) const {
  std::vector<std::size_t> ids;
  for_each_candidate(center, radius_m,
                     [&](Entry const& e) { ids.push_back(e.id); });
  std::sort(begin(ids), end(ids));
  return ids;
}

std::size_t SpatialIndex::count_within(GeoPoint const& center,
                                       double radius_m) const {
  std::size_t n = 0;
  for_each_candidate(center, radius_m, [&](Entry const&) { ++n; });
  return n;
}

}  // namespace cabfare
