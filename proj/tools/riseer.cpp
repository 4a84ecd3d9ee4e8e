#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "riseer/pipeline.hpp"
#include "riseer/service.hpp"
#include "riseer/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace riseer;

namespace {

struct Common {
  std::string config_file;
  std::string input;
  std::string out;
};

PipelineConfig load(const Common& c) {
  return c.config_file.empty() ? PipelineConfig{} : load_config(c.config_file);
}

void emit(const json& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  f << doc.dump();
  if (!f) throw Error(Errc::io_error, "cannot write " + out);
  spdlog::info("wrote {}", out);
}

Analysis ingest_only(const Common& c, const PipelineConfig& config) {
  Analysis a;
  auto parsed = parse_records_file(c.input);
  try {
    stage_ingest(a, std::move(parsed), config);
  } catch (const Error& e) {
    throw StageError("ingest", e);
  }
  return a;
}

void add_common(CLI::App* cmd, Common& c, bool needs_input = true) {
  cmd->add_option("--config", c.config_file, "JSON pipeline config")->check(CLI::ExistingFile);
  if (needs_input) {
    cmd->add_option("--input,-i", c.input, "records file (.csv or .jsonl)")
        ->required()
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--out,-o", c.out, "output path (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riseer: regional industrial structure evolution engine"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  Common c;

  auto* synth = app.add_subcommand("synth", "generate a synthetic registry");
  std::string scenario_file, truth_file;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--scenario", scenario_file, "scenario JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", synth_seed, "override the scenario seed");
  synth->add_option("--out,-o", c.out, "records CSV")->required();
  synth->add_option("--truth", truth_file, "ground-truth sidecar (default <out>.truth.json)");

  auto* ingest = app.add_subcommand("ingest", "parse records and build monthly snapshots");
  add_common(ingest, c);
  std::string rejections_file;
  ingest->add_option("--rejections", rejections_file, "write the rejection report (JSONL)");

  auto* segment = app.add_subcommand("segment", "top-down segmentation of the monthly series");
  add_common(segment, c);
  std::string threshold, series;
  segment->add_option("--threshold", threshold, "fraction of range, or abs:<value>");
  segment->add_option("--series", series, "total | tier:<name>");

  auto* cluster = app.add_subcommand("cluster", "density clustering per period");
  add_common(cluster, c);
  std::string period = "all";
  std::optional<double> eps;
  std::optional<std::size_t> minpts;
  cluster->add_option("--period", period, "period index or all");
  auto* eps_opt = cluster->add_option("--eps", eps, "manual eps (km)");
  auto* minpts_opt = cluster->add_option("--minpts", minpts, "manual MinPts");
  eps_opt->needs(minpts_opt);
  minpts_opt->needs(eps_opt);

  auto* forecast = app.add_subcommand("forecast", "expanding-window forecast with attributions");
  add_common(forecast, c);
  std::string tier = "all", model;
  std::optional<std::size_t> window;
  std::optional<std::uint64_t> seed;
  forecast->add_option("--tier", tier, "Primary|Secondary|Tertiary|all");
  forecast->add_option("--model", model, "rf|gbt|naive (default: all configured)");
  forecast->add_option("--L", window, "window length in months");
  forecast->add_option("--seed", seed, "model seed");

  auto* project = app.add_subcommand("project", "t-SNE projection of monthly snapshots");
  add_common(project, c);
  std::optional<double> perplexity;
  std::optional<std::size_t> iterations;
  project->add_option("--perplexity", perplexity);
  project->add_option("--iterations", iterations);
  project->add_option("--seed", seed);

  auto* paths = app.add_subcommand("paths", "cluster lineage across periods");
  add_common(paths, c);

  auto* run = app.add_subcommand("run", "full pipeline into an artifact store");
  add_common(run, c);
  bool force = false;
  run->add_flag("--force", force, "rebuild even if the store is up to date");

  auto* serve = app.add_subcommand("serve", "serve a store over HTTP");
  std::string store_dir, host = "127.0.0.1", ui_dir;
  int port = 8080;
  serve->add_option("--store", store_dir, "store directory (default $RISEER_STORE or ./store)");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--ui", ui_dir, "static UI bundle to mount at /");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_default_logger(spdlog::stderr_color_mt("riseer"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*synth) {
      auto scenario = [&] {
        std::ifstream in(scenario_file);
        return scenario_from_json(json::parse(in));
      }();
      if (synth_seed) scenario.seed = *synth_seed;
      const Scenario s = generate(scenario);
      {
        std::ofstream out(c.out);
        write_csv(out, s.records);
        if (!out) throw Error(Errc::io_error, "cannot write " + c.out);
      }
      if (truth_file.empty()) truth_file = c.out + ".truth.json";
      std::ofstream(truth_file) << ground_truth_to_json(s.truth, s.records).dump();
      spdlog::info("wrote {} records to {} (truth: {})", s.records.size(), c.out, truth_file);
      return 0;
    }
    if (*serve) {
      const fs::path dir = store_dir.empty() ? store_from_env("store") : fs::path(store_dir);
      ServeOptions opts{host, port, std::nullopt};
      if (!ui_dir.empty()) opts.ui_dir = ui_dir;
      HttpServer server(ArtifactStore::open(dir), opts);
      server.run();
      return 0;
    }

    PipelineConfig config = load(c);
    if (*run) {
      if (c.out.empty()) c.out = store_from_env("store").string();
      const auto summary = run_pipeline(c.input, config, c.out, RunOptions{force});
      std::cout << (summary.reused ? "up to date: " : "built: ") << summary.store.string()
                << " (" << summary.manifest.value("dataset_id", "") << ")\n";
      return 0;
    }
    if (*ingest) {
      Analysis a = ingest_only(c, config);
      if (!rejections_file.empty()) {
        std::ofstream out(rejections_file);
        write_rejections_jsonl(out, a.rejections);
      }
      spdlog::info("{} records, {} rejected", a.records.size(), a.rejections.size());
      emit(snapshots_artifact(a.snapshots, a.warnings, a.vocab), c.out);
      return 0;
    }
    if (*segment) {
      if (!threshold.empty()) config.segmentation.threshold = Threshold::parse(threshold);
      if (!series.empty()) config.segmentation.series = SeriesSelector::parse(series);
      Analysis a = ingest_only(c, config);
      stage_segment(a, config);
      emit(segments_artifact(a.segmentation), c.out);
      return 0;
    }
    if (*cluster || *paths) {
      if (eps) config.clustering.manual = ClusterParams{*eps, *minpts};
      Analysis a = ingest_only(c, config);
      stage_segment(a, config);
      if (*cluster && period != "all") {
        const auto p = std::stoul(period);
        if (p >= a.segmentation.periods.size()) {
          throw Error(Errc::not_found, "period " + period + " does not exist");
        }
        a.segmentation.periods = {a.segmentation.periods[p]};
      }
      stage_cluster(a, config);
      if (*cluster) {
        emit(clusters_artifact(a.clusters, a.records), c.out);
      } else {
        stage_evolution(a, config);
        emit(paths_artifact(a.lineage), c.out);
      }
      return 0;
    }
    if (*forecast) {
      if (tier != "all") {
        auto t = parse_tier(tier);
        if (!t) throw Error(Errc::invalid_argument, "unknown tier " + tier);
        config.forecast.tiers = {*t};
      }
      if (!model.empty()) {
        auto m = parse_model(model);
        if (!m) throw Error(Errc::invalid_argument, "unknown model " + model);
        config.forecast.models = {*m};
      }
      if (window) config.forecast.window = *window;
      if (seed) config.forecast.seed = *seed;
      config.validate();
      Analysis a = ingest_only(c, config);
      stage_forecast(a, config);
      emit(forecast_artifact(a.forecasts, config.forecast, a.first_evaluation), c.out);
      return 0;
    }
    if (*project) {
      if (perplexity) config.projection.perplexity = *perplexity;
      if (iterations) config.projection.iterations = *iterations;
      if (seed) config.projection.seed = *seed;
      config.validate();
      Analysis a = ingest_only(c, config);
      stage_project(a, config);
      emit(projection_artifact(a.projection), c.out);
      return 0;
    }
  } catch (const Error& e) {
    spdlog::error("{} ({})", e.what(), to_string(e.code()));
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
