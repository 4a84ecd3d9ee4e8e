#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace riseer {

inline constexpr double kEarthRadiusKm = 6371.0;

struct LonLat {
  double lon = 0.0;
  double lat = 0.0;

  bool operator==(const LonLat&) const = default;
};

/// Great-circle distance on a sphere of radius 6371.0 km.
double haversine_km(const LonLat& a, const LonLat& b);

/// Uniform lon/lat grid over a point set for bounded-radius and k-nearest
/// queries under the haversine metric. Cell extents are chosen so that a
/// point k cells away is provably farther than the scanned radius, which
/// keeps range queries exact. Longitude wrap-around is not handled.
class GeoGrid {
 public:
  GeoGrid(std::span<const LonLat> points, double cell_km);

  std::size_t size() const { return points_.size(); }
  const LonLat& point(std::size_t i) const { return points_[i]; }

  /// Distance between two indexed points (uses cached trigonometry).
  double distance(std::size_t i, std::size_t j) const;

  /// Calls fn(j, distance) for every indexed point within radius_km of point i
  /// (i itself included).
  template <typename Fn>
  void for_each_within(std::size_t i, double radius_km, Fn&& fn) const {
    auto [lat_rings, lon_rings] = rings_for(radius_km);
    const auto [cx, cy] = cell_of_point_[i];
    const std::int64_t x0 = std::max<std::int64_t>(0, cx - lon_rings);
    const std::int64_t x1 = std::min<std::int64_t>(nx_ - 1, cx + lon_rings);
    const std::int64_t y0 = std::max<std::int64_t>(0, cy - lat_rings);
    const std::int64_t y1 = std::min<std::int64_t>(ny_ - 1, cy + lat_rings);
    for (std::int64_t y = y0; y <= y1; ++y) {
      for (std::int64_t x = x0; x <= x1; ++x) {
        const std::size_t cell = static_cast<std::size_t>(y * nx_ + x);
        for (std::size_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
          const std::size_t j = cell_points_[k];
          const double d = distance(i, j);
          if (d <= radius_km) fn(j, d);
        }
      }
    }
  }

  /// Number of indexed points within radius_km of point i, itself included.
  std::size_t count_within(std::size_t i, double radius_km) const;

  /// Distances from point i to its k nearest other points, ascending. Returns
  /// fewer when the grid holds fewer than k + 1 points.
  std::vector<double> knn_distances(std::size_t i, std::size_t k) const;

 private:
  std::pair<std::int64_t, std::int64_t> rings_for(double radius_km) const;
  // Lower bound on the distance to any point outside the ring-r block.
  double ring_lower_bound(std::int64_t r) const;

  std::vector<LonLat> points_;
  std::vector<double> lat_rad_, lon_rad_, cos_lat_;
  std::vector<std::pair<std::int64_t, std::int64_t>> cell_of_point_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::uint32_t> cell_points_;
  double min_lon_ = 0.0, min_lat_ = 0.0;
  double cell_lon_deg_ = 1.0, cell_lat_deg_ = 1.0;
  double cos_lat_max_ = 1.0;
  std::int64_t nx_ = 1, ny_ = 1;
};

}  // namespace riseer
