#include "riseer/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "riseer/error.hpp"

namespace riseer {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr std::int64_t kMaxCells = std::int64_t{1} << 22;

double haversine_rad(double lat1, double lon1, double cos1, double lat2, double lon2,
                     double cos2) {
  const double s_lat = std::sin((lat2 - lat1) * 0.5);
  const double s_lon = std::sin((lon2 - lon1) * 0.5);
  double h = s_lat * s_lat + cos1 * cos2 * s_lon * s_lon;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

}  // namespace

double haversine_km(const LonLat& a, const LonLat& b) {
  const double lat1 = a.lat * kDegToRad, lat2 = b.lat * kDegToRad;
  return haversine_rad(lat1, a.lon * kDegToRad, std::cos(lat1), lat2, b.lon * kDegToRad,
                       std::cos(lat2));
}

GeoGrid::GeoGrid(std::span<const LonLat> points, double cell_km)
    : points_(points.begin(), points.end()) {
  if (!(cell_km > 0.0) || !std::isfinite(cell_km)) {
    throw Error(Errc::invalid_argument, "grid cell size must be positive");
  }
  const std::size_t n = points_.size();
  lat_rad_.resize(n);
  lon_rad_.resize(n);
  cos_lat_.resize(n);
  double max_abs_lat = 0.0;
  double max_lon = 0.0, max_lat = 0.0;
  if (n > 0) {
    min_lon_ = max_lon = points_[0].lon;
    min_lat_ = max_lat = points_[0].lat;
  }
  for (std::size_t i = 0; i < n; ++i) {
    lat_rad_[i] = points_[i].lat * kDegToRad;
    lon_rad_[i] = points_[i].lon * kDegToRad;
    cos_lat_[i] = std::cos(lat_rad_[i]);
    max_abs_lat = std::max(max_abs_lat, std::abs(points_[i].lat));
    min_lon_ = std::min(min_lon_, points_[i].lon);
    max_lon = std::max(max_lon, points_[i].lon);
    min_lat_ = std::min(min_lat_, points_[i].lat);
    max_lat = std::max(max_lat, points_[i].lat);
  }
  cos_lat_max_ = std::max(std::cos(max_abs_lat * kDegToRad), 1e-6);

  // Grow the cell until the dense grid stays bounded.
  for (;;) {
    cell_lat_deg_ = cell_km / kEarthRadiusKm / kDegToRad;
    const double ratio = std::min(1.0, cell_km / (2.0 * kEarthRadiusKm * cos_lat_max_));
    cell_lon_deg_ = 2.0 * std::asin(ratio) / kDegToRad;
    nx_ = static_cast<std::int64_t>((max_lon - min_lon_) / cell_lon_deg_) + 1;
    ny_ = static_cast<std::int64_t>((max_lat - min_lat_) / cell_lat_deg_) + 1;
    if (nx_ * ny_ <= kMaxCells) break;
    cell_km *= 2.0;
  }

  cell_of_point_.resize(n);
  std::vector<std::size_t> counts(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto cx = std::min<std::int64_t>(
        nx_ - 1, static_cast<std::int64_t>((points_[i].lon - min_lon_) / cell_lon_deg_));
    auto cy = std::min<std::int64_t>(
        ny_ - 1, static_cast<std::int64_t>((points_[i].lat - min_lat_) / cell_lat_deg_));
    cell_of_point_[i] = {cx, cy};
    ++counts[static_cast<std::size_t>(cy * nx_ + cx) + 1];
  }
  for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
  cell_start_ = counts;
  cell_points_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [cx, cy] = cell_of_point_[i];
    cell_points_[counts[static_cast<std::size_t>(cy * nx_ + cx)]++] =
        static_cast<std::uint32_t>(i);
  }
}

double GeoGrid::distance(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  return haversine_rad(lat_rad_[i], lon_rad_[i], cos_lat_[i], lat_rad_[j], lon_rad_[j],
                       cos_lat_[j]);
}

std::pair<std::int64_t, std::int64_t> GeoGrid::rings_for(double radius_km) const {
  // Cells k apart hold points more than (k - 1) cell extents apart.
  const double lat_cell_km = cell_lat_deg_ * kDegToRad * kEarthRadiusKm;
  auto lat_rings = static_cast<std::int64_t>(std::ceil(radius_km / lat_cell_km - 1e-12));
  const double ratio = radius_km / (2.0 * kEarthRadiusKm * cos_lat_max_);
  std::int64_t lon_rings = nx_;
  if (ratio < 1.0) {
    const double needed = 2.0 * std::asin(ratio) / kDegToRad;
    lon_rings = static_cast<std::int64_t>(std::ceil(needed / cell_lon_deg_ - 1e-12));
  }
  return {std::min(std::max<std::int64_t>(lat_rings, 1), ny_),
          std::min(std::max<std::int64_t>(lon_rings, 1), nx_)};
}

double GeoGrid::ring_lower_bound(std::int64_t r) const {
  if (r <= 0) return 0.0;
  const double by_lat = static_cast<double>(r) * cell_lat_deg_ * kDegToRad * kEarthRadiusKm;
  const double angle = std::min(std::numbers::pi, static_cast<double>(r) * cell_lon_deg_ * kDegToRad);
  const double by_lon = 2.0 * kEarthRadiusKm * cos_lat_max_ * std::sin(angle / 2.0);
  return std::min(by_lat, by_lon);
}

std::size_t GeoGrid::count_within(std::size_t i, double radius_km) const {
  std::size_t count = 0;
  for_each_within(i, radius_km, [&](std::size_t, double) { ++count; });
  return count;
}

std::vector<double> GeoGrid::knn_distances(std::size_t i, std::size_t k) const {
  std::priority_queue<double> best;  // max-heap of the k smallest
  const auto [cx, cy] = cell_of_point_[i];
  const std::int64_t max_ring = std::max(nx_, ny_);
  auto visit_cell = [&](std::int64_t x, std::int64_t y) {
    if (x < 0 || y < 0 || x >= nx_ || y >= ny_) return;
    const std::size_t cell = static_cast<std::size_t>(y * nx_ + x);
    for (std::size_t p = cell_start_[cell]; p < cell_start_[cell + 1]; ++p) {
      const std::size_t j = cell_points_[p];
      if (j == i) continue;
      const double d = distance(i, j);
      if (best.size() < k) {
        best.push(d);
      } else if (d < best.top()) {
        best.pop();
        best.push(d);
      }
    }
  };
  for (std::int64_t r = 0; r <= max_ring; ++r) {
    if (r == 0) {
      visit_cell(cx, cy);
    } else {
      for (std::int64_t x = cx - r; x <= cx + r; ++x) {
        visit_cell(x, cy - r);
        visit_cell(x, cy + r);
      }
      for (std::int64_t y = cy - r + 1; y <= cy + r - 1; ++y) {
        visit_cell(cx - r, y);
        visit_cell(cx + r, y);
      }
    }
    // Unscanned points lie at least r cells away along some axis.
    if (best.size() == k && best.top() <= ring_lower_bound(r)) break;
  }
  std::vector<double> out(best.size());
  for (std::size_t p = out.size(); p-- > 0;) {
    out[p] = best.top();
    best.pop();
  }
  return out;
}

}  // namespace riseer
