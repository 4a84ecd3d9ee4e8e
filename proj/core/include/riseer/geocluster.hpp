#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riseer/geo.hpp"
#include "riseer/ingest.hpp"
#include "riseer/segmentation.hpp"

namespace riseer {

struct ClusterParams {
  double eps_km = 1.0;
  std::size_t min_pts = 2;

  bool operator==(const ClusterParams&) const = default;
};

inline constexpr int kNoise = -1;

struct DbscanResult {
  std::vector<int> labels;  // cluster id (0-based, discovery order) or kNoise
  std::size_t clusters = 0;
};

/// K-average-nearest-neighbour curve: entry k-1 is the mean distance from
/// every point to its k-th nearest neighbour, k = 1..k_max. k_max defaults to
/// min(n - 1, 40). Throws Error{degenerate_dataset} for fewer than 2 points.
std::vector<double> eps_candidates(std::span<const LonLat> points,
                                   std::size_t k_max = 40);

/// round(mean eps-neighbourhood size), neighbourhoods counting the point
/// itself, clamped to at least 2.
std::size_t minpts_for_eps(std::span<const LonLat> points, double eps_km);

/// Density clustering under the haversine metric. Points are visited in input
/// order; a border point joins the first cluster that reaches it.
DbscanResult dbscan(std::span<const LonLat> points, const ClusterParams& params);

struct SweepStep {
  double eps_km = 0.0;
  std::size_t min_pts = 0;
  std::size_t clusters = 0;
};

struct ParamSearch {
  ClusterParams params;
  bool stable = false;      // false: fell back to the median candidate
  std::size_t stable_count = 0;
  std::vector<SweepStep> sweep;
};

inline constexpr std::size_t kMinClusterDataset = 10;

/// Sweeps the candidate curve in ascending eps until the first run of three
/// consecutive equal (non-zero) cluster counts, follows the run until the
/// count changes, and returns the largest-eps (lowest density) parameters of
/// the run. Falls back to the median candidate otherwise.
ParamSearch search_params(std::span<const LonLat> points, std::size_t k_max = 40);

/// Like search_params but throws Error{unstable} when no stable run exists
/// and Error{degenerate_dataset} below kMinClusterDataset points.
ClusterParams stable_params(std::span<const LonLat> points, std::size_t k_max = 40);

/// K = 1 KMeans fixed point (the coordinate-wise mean).
LonLat kmeans_centroid(std::span<const LonLat> members);

struct RegionalCluster {
  std::string id;
  std::size_t period = 0;
  std::vector<std::uint32_t> members;  // record positions, ascending
  LonLat centroid;

  std::size_t size() const { return members.size(); }
};

struct PeriodClusters {
  Period period;
  ClusterParams params;
  bool auto_params = true;
  bool stable = false;
  std::vector<SweepStep> sweep;
  std::vector<RegionalCluster> clusters;
  std::size_t active_records = 0;
  std::size_t noise = 0;
};

struct ClusterOptions {
  std::optional<ClusterParams> manual;  // skips the automatic search
  std::size_t k_max = 40;
};

std::string cluster_id(std::size_t period, std::size_t index);

/// Clusters the enterprises active at any month of the period. Periods with
/// fewer than kMinClusterDataset actives yield no clusters; every active
/// point is then counted as noise.
PeriodClusters cluster_period(std::span<const EnterpriseRecord> records,
                              const Period& period, const ClusterOptions& options = {});

/// cluster_period over every period, periods evaluated concurrently.
std::vector<PeriodClusters> cluster_periods(std::span<const EnterpriseRecord> records,
                                            std::span<const Period> periods,
                                            const ClusterOptions& options = {});

}  // namespace riseer
