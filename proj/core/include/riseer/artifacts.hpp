#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riseer/config.hpp"
#include "riseer/evolution.hpp"
#include "riseer/forecast.hpp"
#include "riseer/geocluster.hpp"
#include "riseer/ingest.hpp"
#include "riseer/metrics.hpp"
#include "riseer/projection.hpp"
#include "riseer/segmentation.hpp"

namespace riseer {

inline constexpr std::array<std::string_view, 7> kArtifactKinds{
    "snapshots", "segments", "clusters", "indicators", "paths", "forecast", "projection"};

/// "riseer.<kind>.v1"
std::string schema_id(std::string_view kind);

struct SegmentationResult {
  SeriesSelector series;
  Threshold threshold;
  double threshold_value = 0.0;
  Month first;
  std::vector<double> values;
  std::vector<Segment> segments;
  std::vector<Period> periods;
};

struct ClusterMetrics {
  std::string id;
  std::size_t period = 0;
  Date as_of;
  IndicatorSet indicators;
  RingProfile rings;
  std::array<double, kMetricCount> normalized{};
};

struct PathGrowth {
  std::string path_id;
  std::vector<GrowthBox> boxes;
};

struct Lineage {
  std::vector<LineageEdge> edges;
  std::vector<EvolutionPath> paths;
  std::vector<OverlapMatrix> matrices;
};

nlohmann::json aggregation_index_json(const AggregationIndex& ai);
nlohmann::json indicator_json(const IndicatorSet& set);
nlohmann::json ring_profile_json(const RingProfile& rings);
nlohmann::json edge_json(const LineageEdge& edge);
nlohmann::json snapshot_json(const MonthlySnapshot& snapshot);
nlohmann::json forecast_point_json(const ForecastPoint& point);

nlohmann::json snapshots_artifact(std::span<const MonthlySnapshot> snapshots,
                                  std::span<const std::string> warnings,
                                  const Vocabularies& vocab);
nlohmann::json segments_artifact(const SegmentationResult& result);
nlohmann::json clusters_artifact(std::span<const PeriodClusters> periods,
                                 std::span<const EnterpriseRecord> records);
nlohmann::json indicators_artifact(std::span<const ClusterMetrics> clusters,
                                   std::span<const PathGrowth> growth);
nlohmann::json paths_artifact(const Lineage& lineage);
nlohmann::json forecast_artifact(std::span<const ForecastRun> runs,
                                 const ForecastSettings& settings,
                                 std::optional<Month> first_evaluation);
nlohmann::json projection_artifact(const Projection& projection);

}  // namespace riseer
