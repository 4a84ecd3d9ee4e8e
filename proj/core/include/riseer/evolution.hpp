#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riseer/geocluster.hpp"

namespace riseer {

struct LineageEdge {
  std::string from_cluster;
  std::string to_cluster;
  std::size_t from_period = 0;
  std::size_t to_period = 0;
  std::size_t overlap = 0;
  double centroid_shift_km = 0.0;
};

/// |members(a) ∩ members(b)|; member lists must be sorted.
std::size_t overlap(const RegionalCluster& a, const RegionalCluster& b);

struct MatchOptions {
  std::size_t min_overlap = 1;
  double min_overlap_fraction = 0.0;  // of |A|
};

/// Each cluster of period t gets at most one edge, to its largest-overlap
/// successor; ties go to the smaller centroid shift, then the smaller id.
std::vector<LineageEdge> match_period_pair(std::span<const RegionalCluster> from,
                                           std::span<const RegionalCluster> to,
                                           const MatchOptions& options = {});

/// Full overlap matrix between two consecutive periods (rows: from).
struct OverlapMatrix {
  std::size_t from_period = 0;
  std::size_t to_period = 0;
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<std::size_t>> counts;
};

OverlapMatrix overlap_matrix(std::span<const RegionalCluster> from,
                             std::span<const RegionalCluster> to);

struct EvolutionPath {
  std::string path_id;
  std::vector<std::string> clusters;
  std::vector<std::size_t> periods;
  std::vector<LineageEdge> edges;
};

/// Maximal chains starting at every cluster without a predecessor. Merging
/// chains share their common suffix; unmatched clusters become singletons.
/// periods[k] holds the clusters of the k-th period; edges may come in any order.
std::vector<EvolutionPath> build_paths(
    std::span<const std::vector<RegionalCluster>> periods, std::span<const LineageEdge> edges);

struct EdgeAnnotation {
  std::size_t transfers = 0;
  double shift_km = 0.0;
  std::string label;  // e.g. "155,950 | 1.87 km"
};

EdgeAnnotation edge_annotations(const LineageEdge& edge);

}  // namespace riseer
