#include "riseer/geocluster.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include <spdlog/spdlog.h>

#include "riseer/error.hpp"

namespace riseer {
namespace {

// Cell size for nearest-neighbour grids: roughly a few points per cell.
double knn_cell_km(std::span<const LonLat> points) {
  double min_lon = points[0].lon, max_lon = min_lon;
  double min_lat = points[0].lat, max_lat = min_lat;
  for (const auto& p : points) {
    min_lon = std::min(min_lon, p.lon);
    max_lon = std::max(max_lon, p.lon);
    min_lat = std::min(min_lat, p.lat);
    max_lat = std::max(max_lat, p.lat);
  }
  const double w = haversine_km({min_lon, min_lat}, {max_lon, min_lat});
  const double h = haversine_km({min_lon, min_lat}, {min_lon, max_lat});
  const double area = std::max(w, 1e-3) * std::max(h, 1e-3);
  return std::max(std::sqrt(4.0 * area / static_cast<double>(points.size())), 1e-4);
}

std::size_t resolve_k_max(std::size_t n, std::size_t k_max) {
  return std::max<std::size_t>(1, std::min(n - 1, k_max));
}

std::size_t minpts_on_grid(const GeoGrid& grid, double eps_km) {
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    total += static_cast<double>(grid.count_within(i, eps_km));
  }
  auto rounded = std::llround(total / static_cast<double>(grid.size()));
  return static_cast<std::size_t>(std::max<long long>(rounded, 2));
}

DbscanResult dbscan_on_grid(const GeoGrid& grid, const ClusterParams& params) {
  constexpr int kUnvisited = -2;
  const std::size_t n = grid.size();
  DbscanResult result;
  result.labels.assign(n, kUnvisited);
  std::vector<std::uint32_t> neighbours, queue;

  auto region = [&](std::size_t i) {
    neighbours.clear();
    grid.for_each_within(i, params.eps_km, [&](std::size_t j, double) {
      neighbours.push_back(static_cast<std::uint32_t>(j));
    });
  };

  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (result.labels[i] != kUnvisited) continue;
    region(i);
    if (neighbours.size() < params.min_pts) {
      result.labels[i] = kNoise;
      continue;
    }
    const int cluster = next++;
    result.labels[i] = cluster;
    queue.assign(neighbours.begin(), neighbours.end());
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::uint32_t j = queue[q];
      if (result.labels[j] == kNoise) {
        result.labels[j] = cluster;  // border point, already known non-core
        continue;
      }
      if (result.labels[j] != kUnvisited) continue;
      result.labels[j] = cluster;
      region(j);
      if (neighbours.size() >= params.min_pts) {
        queue.insert(queue.end(), neighbours.begin(), neighbours.end());
      }
    }
  }
  result.clusters = static_cast<std::size_t>(next);
  return result;
}

void validate(const ClusterParams& params) {
  if (!(params.eps_km > 0.0) || !std::isfinite(params.eps_km)) {
    throw Error(Errc::invalid_argument, "eps must be positive and finite");
  }
  if (params.min_pts < 2) throw Error(Errc::invalid_argument, "min_pts must be >= 2");
}

}  // namespace

std::vector<double> eps_candidates(std::span<const LonLat> points, std::size_t k_max) {
  if (points.size() < 2) {
    throw Error(Errc::degenerate_dataset, "need at least 2 points for eps candidates");
  }
  const std::size_t k = resolve_k_max(points.size(), k_max);
  GeoGrid grid(points, knn_cell_km(points));
  std::vector<double> sums(k, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto d = grid.knn_distances(i, k);
    for (std::size_t j = 0; j < k; ++j) sums[j] += d[j];
  }
  for (auto& s : sums) s /= static_cast<double>(points.size());
  return sums;
}

std::size_t minpts_for_eps(std::span<const LonLat> points, double eps_km) {
  if (!(eps_km > 0.0)) throw Error(Errc::invalid_argument, "eps must be positive");
  if (points.empty()) return 2;
  GeoGrid grid(points, eps_km);
  return minpts_on_grid(grid, eps_km);
}

DbscanResult dbscan(std::span<const LonLat> points, const ClusterParams& params) {
  validate(params);
  if (points.empty()) return {};
  GeoGrid grid(points, params.eps_km);
  return dbscan_on_grid(grid, params);
}

ParamSearch search_params(std::span<const LonLat> points, std::size_t k_max) {
  auto candidates = eps_candidates(points, k_max);
  ParamSearch search;
  std::size_t run = 0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double eps = candidates[k];
    if (!(eps > 0.0)) {
      if (search.stable) break;
      run = 0;
      continue;
    }
    GeoGrid grid(points, eps);
    ClusterParams params{eps, minpts_on_grid(grid, eps)};
    const std::size_t count = dbscan_on_grid(grid, params).clusters;
    if (search.stable && count != search.stable_count) break;
    const bool extends = !search.sweep.empty() && run > 0 &&
                         search.sweep.back().clusters == count;
    search.sweep.push_back({eps, params.min_pts, count});
    run = count == 0 ? 0 : (extends ? run + 1 : 1);
    if (run >= 3) {
      // Last step of the run: lowest density threshold with this count.
      search.params = params;
      search.stable = true;
      search.stable_count = count;
    }
  }
  if (search.stable) return search;
  // No stable run: median candidate.
  const double eps = std::max(candidates[(candidates.size() - 1) / 2], 1e-6);
  search.params = {eps, minpts_for_eps(points, eps)};
  search.stable = false;
  return search;
}

ClusterParams stable_params(std::span<const LonLat> points, std::size_t k_max) {
  if (points.size() < kMinClusterDataset) {
    throw Error(Errc::degenerate_dataset, "too few points for parameter search");
  }
  auto search = search_params(points, k_max);
  if (!search.stable) throw Error(Errc::unstable, "no stable cluster-count run found");
  return search.params;
}

LonLat kmeans_centroid(std::span<const LonLat> members) {
  if (members.empty()) throw Error(Errc::invalid_argument, "empty member set");
  // Lloyd iterations with a single centre: every point is assigned to it, so
  // the update is the mean and the second pass is already a fixed point.
  LonLat centre = members.front();
  for (int iter = 0; iter < 8; ++iter) {
    double lon = 0.0, lat = 0.0;
    for (const auto& p : members) {
      lon += p.lon;
      lat += p.lat;
    }
    const double n = static_cast<double>(members.size());
    LonLat next{lon / n, lat / n};
    if (next == centre) break;
    centre = next;
  }
  return centre;
}

std::string cluster_id(std::size_t period, std::size_t index) {
  return "P" + std::to_string(period) + "-C" + std::to_string(index);
}

PeriodClusters cluster_period(std::span<const EnterpriseRecord> records,
                              const Period& period, const ClusterOptions& options) {
  PeriodClusters out;
  out.period = period;
  std::vector<std::uint32_t> active;
  std::vector<LonLat> points;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].active_during(period.months)) {
      active.push_back(static_cast<std::uint32_t>(i));
      points.push_back({records[i].lon, records[i].lat});
    }
  }
  out.active_records = active.size();
  if (points.empty()) return out;

  if (options.manual) {
    out.params = *options.manual;
    out.auto_params = false;
    out.stable = false;
  } else if (points.size() < kMinClusterDataset) {
    spdlog::warn("period {}: only {} active records, all treated as noise", period.index,
                 points.size());
    out.noise = points.size();
    return out;
  } else {
    auto search = search_params(points, options.k_max);
    if (!search.stable) {
      spdlog::warn("period {}: no stable cluster count, using median eps candidate",
                   period.index);
    }
    out.params = search.params;
    out.stable = search.stable;
    out.sweep = std::move(search.sweep);
  }

  auto labels = dbscan(points, out.params);
  out.clusters.resize(labels.clusters);
  std::vector<std::vector<LonLat>> member_points(labels.clusters);
  for (std::size_t c = 0; c < labels.clusters; ++c) {
    out.clusters[c].id = cluster_id(period.index, c);
    out.clusters[c].period = period.index;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int label = labels.labels[i];
    if (label == kNoise) {
      ++out.noise;
      continue;
    }
    out.clusters[static_cast<std::size_t>(label)].members.push_back(active[i]);
    member_points[static_cast<std::size_t>(label)].push_back(points[i]);
  }
  for (std::size_t c = 0; c < labels.clusters; ++c) {
    out.clusters[c].centroid = kmeans_centroid(member_points[c]);
  }
  return out;
}

std::vector<PeriodClusters> cluster_periods(std::span<const EnterpriseRecord> records,
                                            std::span<const Period> periods,
                                            const ClusterOptions& options) {
  std::vector<std::future<PeriodClusters>> jobs;
  for (const auto& p : periods) {
    jobs.push_back(std::async(std::launch::async, [&records, p, &options] {
      return cluster_period(records, p, options);
    }));
  }
  std::vector<PeriodClusters> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace riseer
