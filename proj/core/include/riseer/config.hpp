#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riseer/calendar.hpp"
#include "riseer/evolution.hpp"
#include "riseer/forecast.hpp"
#include "riseer/geocluster.hpp"
#include "riseer/metrics.hpp"
#include "riseer/projection.hpp"
#include "riseer/segmentation.hpp"

namespace riseer {

struct SegmentationConfig {
  Threshold threshold;
  SeriesSelector series;
  std::size_t max_periods = 5;
  std::size_t min_period_months = 6;
};

struct ModelSettings {
  std::size_t trees = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  double subsample = 0.8;
};

struct ForecastSettings {
  std::size_t window = 12;
  std::vector<ModelKind> models{ModelKind::RandomForest, ModelKind::GradientBoostedTrees,
                                ModelKind::NaiveLast};
  std::vector<Tier> tiers{kTiers.begin(), kTiers.end()};
  ModelSettings rf{100, 6, 0.1, 1.0};
  ModelSettings gbt{100, 3, 0.1, 0.8};
  double min_leaf_weight = 2.0;
  std::uint64_t seed = 7;
  int initial_years = 11;
  RefitSchedule refit = RefitSchedule::Yearly;
  TargetMode target = TargetMode::Delta;

  ForecastConfig for_model(ModelKind kind) const;
};

/// Everything a pipeline run depends on besides the dataset. Unknown keys in
/// the JSON form are rejected so typos do not silently fall back to defaults.
struct PipelineConfig {
  std::optional<MonthRange> span;  // nullopt: data span
  std::vector<std::string> credit_scale{"A", "B", "C", "D", "M"};
  std::string surviving_state = "surviving";
  SegmentationConfig segmentation;
  ClusterOptions clustering;
  std::vector<RingBand> rings = default_rings();
  AiBasis ai_basis = AiBasis::MemberCount;
  MatchOptions evolution;
  ForecastSettings forecast;
  TsneOptions projection;

  MetricsOptions metrics_options() const;
  void validate() const;

  static PipelineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Reads a JSON config file; throws Error{io_error} or Error{parse_error}.
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace riseer
