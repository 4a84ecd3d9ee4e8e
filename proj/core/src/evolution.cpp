#include "riseer/evolution.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

namespace riseer {

std::size_t overlap(const RegionalCluster& a, const RegionalCluster& b) {
  std::size_t count = 0;
  auto i = a.members.begin(), j = b.members.begin();
  while (i != a.members.end() && j != b.members.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

std::vector<LineageEdge> match_period_pair(std::span<const RegionalCluster> from,
                                           std::span<const RegionalCluster> to,
                                           const MatchOptions& options) {
  std::vector<LineageEdge> edges;
  for (const auto& a : from) {
    const RegionalCluster* best = nullptr;
    std::size_t best_overlap = 0;
    double best_shift = 0.0;
    for (const auto& b : to) {
      const std::size_t o = overlap(a, b);
      if (o == 0) continue;
      const double shift = haversine_km(a.centroid, b.centroid);
      const bool better =
          !best || o > best_overlap ||
          (o == best_overlap &&
           (shift < best_shift || (shift == best_shift && b.id < best->id)));
      if (better) {
        best = &b;
        best_overlap = o;
        best_shift = shift;
      }
    }
    if (!best) continue;
    const double threshold =
        options.min_overlap_fraction * static_cast<double>(a.members.size());
    if (best_overlap < std::max<std::size_t>(options.min_overlap, 1) ||
        static_cast<double>(best_overlap) < threshold) {
      continue;
    }
    edges.push_back({a.id, best->id, a.period, best->period, best_overlap, best_shift});
  }
  return edges;
}

OverlapMatrix overlap_matrix(std::span<const RegionalCluster> from,
                             std::span<const RegionalCluster> to) {
  OverlapMatrix m;
  if (!from.empty()) m.from_period = from.front().period;
  if (!to.empty()) m.to_period = to.front().period;
  for (const auto& a : from) m.rows.push_back(a.id);
  for (const auto& b : to) m.cols.push_back(b.id);
  for (const auto& a : from) {
    std::vector<std::size_t> row;
    for (const auto& b : to) row.push_back(overlap(a, b));
    m.counts.push_back(std::move(row));
  }
  return m;
}

std::vector<EvolutionPath> build_paths(
    std::span<const std::vector<RegionalCluster>> periods, std::span<const LineageEdge> edges) {
  std::unordered_map<std::string, const LineageEdge*> out_edge;
  std::unordered_map<std::string, std::size_t> in_degree;
  std::unordered_map<std::string, std::size_t> period_of;
  for (const auto& e : edges) {
    out_edge.emplace(e.from_cluster, &e);
    ++in_degree[e.to_cluster];
  }
  for (const auto& clusters : periods) {
    for (const auto& c : clusters) period_of.emplace(c.id, c.period);
  }

  std::vector<EvolutionPath> paths;
  for (const auto& clusters : periods) {
    for (const auto& start : clusters) {
      if (in_degree.count(start.id)) continue;
      EvolutionPath path;
      path.path_id = "R" + std::to_string(paths.size());
      std::string current = start.id;
      path.clusters.push_back(current);
      path.periods.push_back(start.period);
      // Periods strictly increase along edges, so the chain terminates.
      for (auto it = out_edge.find(current); it != out_edge.end();
           it = out_edge.find(current)) {
        const LineageEdge& e = *it->second;
        path.edges.push_back(e);
        current = e.to_cluster;
        path.clusters.push_back(current);
        path.periods.push_back(e.to_period);
      }
      paths.push_back(std::move(path));
    }
  }
  return paths;
}

EdgeAnnotation edge_annotations(const LineageEdge& edge) {
  EdgeAnnotation a;
  a.transfers = edge.overlap;
  a.shift_km = edge.centroid_shift_km;
  std::string digits = std::to_string(edge.overlap);
  std::string grouped;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) grouped.push_back(',');
    grouped.push_back(digits[i]);
  }
  char km[32];
  std::snprintf(km, sizeof km, "%.2f km", edge.centroid_shift_km);
  a.label = grouped + " | " + km;
  return a;
}

}  // namespace riseer
