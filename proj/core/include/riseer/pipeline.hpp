#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riseer/artifacts.hpp"
#include "riseer/config.hpp"
#include "riseer/error.hpp"

namespace riseer {

/// Error raised by a pipeline stage; what() reads "<stage>: <cause>".
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// In-memory state of one pipeline run, filled stage by stage.
struct Analysis {
  std::vector<EnterpriseRecord> records;
  std::vector<Rejection> rejections;
  Vocabularies vocab;
  MonthIndex index;
  std::vector<MonthlySnapshot> snapshots;
  std::vector<std::string> warnings;
  SegmentationResult segmentation;
  std::vector<PeriodClusters> clusters;
  std::vector<ClusterMetrics> metrics;
  Lineage lineage;
  std::vector<PathGrowth> growth;
  std::vector<ForecastRun> forecasts;
  std::optional<Month> first_evaluation;
  Projection projection;
};

/// Throws Error{degenerate_dataset} when no record survived parsing.
void stage_ingest(Analysis& a, ParseResult parsed, const PipelineConfig& config);
void stage_segment(Analysis& a, const PipelineConfig& config);
void stage_cluster(Analysis& a, const PipelineConfig& config);
void stage_metrics(Analysis& a, const PipelineConfig& config);
void stage_evolution(Analysis& a, const PipelineConfig& config);
void stage_forecast(Analysis& a, const PipelineConfig& config);
void stage_project(Analysis& a, const PipelineConfig& config);

/// Runs every stage in order; failures are rethrown as StageError.
Analysis analyze(ParseResult parsed, const PipelineConfig& config);

/// The seven artifact documents keyed by kind.
std::map<std::string, nlohmann::json> build_artifacts(const Analysis& a,
                                                      const PipelineConfig& config);

struct RunOptions {
  bool force = false;  // rebuild even when the manifest matches
};

struct RunSummary {
  std::filesystem::path store;
  bool reused = false;
  nlohmann::json manifest;
};

/// Ingests the dataset, runs every stage and publishes the store at out_dir.
/// The store is assembled in a sibling temporary directory and renamed into
/// place, so a failed run leaves any previous store untouched. A rerun whose
/// input and config hashes match the existing manifest is a no-op.
RunSummary run_pipeline(const std::filesystem::path& dataset, const PipelineConfig& config,
                        const std::filesystem::path& out_dir, const RunOptions& options = {});

/// Canonical hash of the config (sha256 of its compact JSON form).
std::string config_hash(const PipelineConfig& config);

}  // namespace riseer
