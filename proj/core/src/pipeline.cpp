#include "riseer/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <unordered_map>

#include <unistd.h>

#include <spdlog/spdlog.h>

#include "riseer/hash.hpp"
#include "riseer/schema.hpp"

namespace riseer {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
void run_stage(const char* name, F&& body) {
  try {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    spdlog::debug("stage {} took {:.3f} s", name, dt.count());
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const std::exception& e) {
    throw StageError(name, Error(Errc::invalid_argument, e.what()));
  }
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
}

json file_entry(const fs::path& path) {
  return {{"sha256", sha256_file(path)}, {"bytes", fs::file_size(path)}};
}

fs::path sibling(const fs::path& out, std::string_view tag) {
  static std::atomic<unsigned> counter{0};
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  return parent / ("." + out.filename().string() + "." + std::string(tag) + "-" +
                   std::to_string(::getpid()) + "-" + std::to_string(counter++));
}

/// True when the store at dir was built from the same input and config and
/// its artifacts are intact.
bool store_matches(const fs::path& dir, const std::string& input_sha,
                   const std::string& config_sha, json& manifest) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) return false;
  try {
    std::ifstream in(path);
    manifest = json::parse(in);
    if (manifest.value("/input/sha256"_json_pointer, std::string()) != input_sha) return false;
    if (manifest.value("config_sha256", std::string()) != config_sha) return false;
    for (const auto& [kind, entry] : manifest.at("artifacts").items()) {
      const fs::path file = dir / entry.at("file").get<std::string>();
      if (!fs::exists(file) || sha256_file(file) != entry.at("sha256").get<std::string>()) {
        return false;
      }
    }
    return manifest.at("artifacts").size() == kArtifactKinds.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string config_hash(const PipelineConfig& config) {
  return sha256_hex(config.to_json().dump());
}

void stage_ingest(Analysis& a, ParseResult parsed, const PipelineConfig& config) {
  a.records = std::move(parsed.records);
  a.rejections = std::move(parsed.rejections);
  if (a.records.empty()) {
    throw Error(Errc::degenerate_dataset,
                "no valid records (" + std::to_string(a.rejections.size()) + " rejected)");
  }
  a.vocab = Vocabularies::build(a.records);
  a.index = config.span ? reindex_by_month(a.records, *config.span) : reindex_by_month(a.records);
  auto series = build_monthly_series(a.index, a.records, CreditScale(config.credit_scale));
  a.snapshots = std::move(series.snapshots);
  a.warnings = std::move(series.warnings);
  for (const auto& w : a.warnings) spdlog::warn("{}", w);
  attach_projection_features(a.snapshots, a.index, a.records, a.vocab);
}

void stage_segment(Analysis& a, const PipelineConfig& config) {
  auto& s = a.segmentation;
  s.series = config.segmentation.series;
  s.threshold = config.segmentation.threshold;
  s.first = a.snapshots.front().month;
  s.values = s.series.extract(a.snapshots);
  s.threshold_value = s.threshold.resolve(s.values);
  s.segments = topdown_segment(s.values, s.threshold_value);
  s.periods = derive_periods(s.segments, s.first, config.segmentation.max_periods,
                             config.segmentation.min_period_months);
}

void stage_cluster(Analysis& a, const PipelineConfig& config) {
  a.clusters = cluster_periods(a.records, a.segmentation.periods, config.clustering);
}

void stage_metrics(Analysis& a, const PipelineConfig& config) {
  const MetricsOptions options = config.metrics_options();
  a.metrics.clear();
  for (const auto& pc : a.clusters) {
    const Date as_of = pc.period.months.last.last_day();
    for (const auto& c : pc.clusters) {
      ClusterMetrics m;
      m.id = c.id;
      m.period = c.period;
      m.as_of = as_of;
      m.indicators = indicator_set(c, a.records, as_of, options);
      m.rings = ring_profile(c, a.records, as_of, options);
      a.metrics.push_back(std::move(m));
    }
  }
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    std::vector<double> values;
    for (const auto& m : a.metrics) values.push_back(metric_value(m.indicators, kMetrics[k]));
    const auto normalized = normalize_for_ranking(values);
    for (std::size_t i = 0; i < a.metrics.size(); ++i) a.metrics[i].normalized[k] = normalized[i];
  }
}

void stage_evolution(Analysis& a, const PipelineConfig& config) {
  std::vector<std::vector<RegionalCluster>> periods;
  for (const auto& pc : a.clusters) periods.push_back(pc.clusters);
  Lineage& l = a.lineage;
  l = {};
  for (std::size_t p = 0; p + 1 < periods.size(); ++p) {
    auto edges = match_period_pair(periods[p], periods[p + 1], config.evolution);
    l.edges.insert(l.edges.end(), edges.begin(), edges.end());
    l.matrices.push_back(overlap_matrix(periods[p], periods[p + 1]));
  }
  l.paths = build_paths(periods, l.edges);

  std::unordered_map<std::string, const RegionalCluster*> by_id;
  for (const auto& clusters : periods) {
    for (const auto& c : clusters) by_id.emplace(c.id, &c);
  }
  // by_id points into the local copy; growth is computed before it goes away.
  a.growth.clear();
  for (const auto& path : l.paths) {
    if (path.clusters.size() < 2) continue;
    std::vector<const RegionalCluster*> chain;
    for (const auto& id : path.clusters) chain.push_back(by_id.at(id));
    a.growth.push_back({path.path_id, growth_rates(chain, a.segmentation.periods, a.records)});
  }
}

void stage_forecast(Analysis& a, const PipelineConfig& config) {
  const auto& f = config.forecast;
  a.first_evaluation = first_evaluation_month(a.snapshots, f.initial_years);
  std::vector<std::future<ForecastRun>> jobs;
  for (auto tier : f.tiers) {
    for (auto model : f.models) {
      jobs.push_back(std::async(std::launch::async, [&a, tier, cfg = f.for_model(model)] {
        return expanding_window_forecast(a.snapshots, tier, cfg);
      }));
    }
  }
  a.forecasts.clear();
  for (auto& job : jobs) a.forecasts.push_back(job.get());
}

void stage_project(Analysis& a, const PipelineConfig& config) {
  a.projection = project_snapshots(a.snapshots, config.projection);
}

Analysis analyze(ParseResult parsed, const PipelineConfig& config) {
  config.validate();
  Analysis a;
  run_stage("ingest", [&] { stage_ingest(a, std::move(parsed), config); });
  run_stage("segmentation", [&] { stage_segment(a, config); });
  run_stage("geocluster", [&] { stage_cluster(a, config); });
  run_stage("metrics", [&] { stage_metrics(a, config); });
  run_stage("evolution", [&] { stage_evolution(a, config); });
  run_stage("forecast", [&] { stage_forecast(a, config); });
  run_stage("projection", [&] { stage_project(a, config); });
  return a;
}

std::map<std::string, json> build_artifacts(const Analysis& a, const PipelineConfig& config) {
  std::map<std::string, json> out;
  out["snapshots"] = snapshots_artifact(a.snapshots, a.warnings, a.vocab);
  out["segments"] = segments_artifact(a.segmentation);
  out["clusters"] = clusters_artifact(a.clusters, a.records);
  out["indicators"] = indicators_artifact(a.metrics, a.growth);
  out["paths"] = paths_artifact(a.lineage);
  out["forecast"] = forecast_artifact(a.forecasts, config.forecast, a.first_evaluation);
  out["projection"] = projection_artifact(a.projection);
  return out;
}

RunSummary run_pipeline(const fs::path& dataset, const PipelineConfig& config,
                        const fs::path& out_dir, const RunOptions& options) {
  config.validate();
  RunSummary summary;
  summary.store = out_dir;
  std::string input_sha;
  run_stage("ingest", [&] { input_sha = sha256_file(dataset); });
  const std::string config_sha = config_hash(config);
  if (!options.force && store_matches(out_dir, input_sha, config_sha, summary.manifest)) {
    spdlog::info("store {} is up to date", out_dir.string());
    summary.reused = true;
    return summary;
  }

  ParseResult parsed;
  run_stage("ingest", [&] { parsed = parse_records_file(dataset); });
  if (!parsed.rejections.empty()) {
    spdlog::warn("{} rows rejected while parsing {}", parsed.rejections.size(), dataset.string());
  }
  const Analysis a = analyze(std::move(parsed), config);
  const auto artifacts = build_artifacts(a, config);

  const fs::path tmp = sibling(out_dir, "tmp");
  try {
    fs::create_directories(tmp / "schemas");
    json manifest{{"schema", "riseer.manifest.v1"},
                  {"dataset_id", "ds-" + input_sha.substr(0, 12)},
                  {"created_at", utc_now()},
                  {"input",
                   {{"path", fs::absolute(dataset).lexically_normal().string()},
                    {"sha256", input_sha},
                    {"records", a.records.size()},
                    {"rejections", a.rejections.size()}}},
                  {"config_sha256", config_sha},
                  {"config", config.to_json()},
                  {"artifacts", json::object()},
                  {"files", json::object()}};
    for (const auto& [kind, doc] : artifacts) {
      const std::string id = schema_id(kind);
      run_stage("store", [&] { require_valid(id, doc); });
      const std::string file = kind + ".json";
      write_text(tmp / file, doc.dump());
      json entry = file_entry(tmp / file);
      entry["file"] = file;
      entry["schema"] = id;
      manifest["artifacts"][kind] = entry;
    }
    {
      std::ofstream out(tmp / "records.csv", std::ios::binary);
      write_csv(out, a.records);
    }
    {
      std::ofstream out(tmp / "rejections.jsonl", std::ios::binary);
      write_rejections_jsonl(out, a.rejections);
    }
    write_text(tmp / "config.json", config.to_json().dump(2));
    for (const auto& id : published_schema_ids()) {
      write_text(tmp / "schemas" / (id + ".json"), published_schema(id).dump(2));
    }
    for (const char* f : {"records.csv", "rejections.jsonl", "config.json"}) {
      manifest["files"][f] = file_entry(tmp / f);
    }
    run_stage("store", [&] { require_valid("riseer.manifest.v1", manifest); });
    write_text(tmp / "manifest.json", manifest.dump(2));

    std::optional<fs::path> old;
    if (fs::exists(out_dir)) {
      old = sibling(out_dir, "old");
      fs::rename(out_dir, *old);
    }
    fs::rename(tmp, out_dir);
    if (old) fs::remove_all(*old);
    summary.manifest = std::move(manifest);
  } catch (const fs::filesystem_error& e) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw StageError("store", Error(Errc::io_error, e.what()));
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  return summary;
}

}  // namespace riseer
