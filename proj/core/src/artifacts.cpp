#include "riseer/artifacts.hpp"

#include <cmath>

#include "riseer/error.hpp"

namespace riseer {
namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vocabulary_slots(const Vocabulary& v) {
  json out = v.values();
  out.push_back("other");
  return out;
}

json tier_name_json(Tier t) { return std::string(tier_name(t)); }

}  // namespace

std::string schema_id(std::string_view kind) { return "riseer." + std::string(kind) + ".v1"; }

json aggregation_index_json(const AggregationIndex& ai) {
  switch (ai.kind) {
    case AggregationIndex::Kind::Finite: return {{"kind", "finite"}, {"value", ai.value}};
    case AggregationIndex::Kind::Unbounded: return {{"kind", "unbounded"}, {"value", nullptr}};
    case AggregationIndex::Kind::Undefined: break;
  }
  return {{"kind", "undefined"}, {"value", nullptr}};
}

json indicator_json(const IndicatorSet& s) {
  return {{"n_primary", s.n_primary},
          {"n_secondary", s.n_secondary},
          {"n_tertiary", s.n_tertiary},
          {"aggregation_index", aggregation_index_json(s.aggregation_index)},
          {"avg_capital", s.avg_capital},
          {"total_capital", s.total_capital},
          {"credit_rating", number_or_null(s.credit_rating)},
          {"livability", s.livability},
          {"mortality", s.mortality}};
}

json ring_profile_json(const RingProfile& rings) {
  json bands = json::array();
  for (std::size_t b = 0; b < rings.bands.size(); ++b) {
    bands.push_back({{"lo_km", rings.bands[b].lo_km},
                     {"hi_km", rings.bands[b].hi_km},
                     {"count", rings.members[b].size()},
                     {"indicators", rings.indicators[b] ? indicator_json(*rings.indicators[b])
                                                        : json(nullptr)}});
  }
  return {{"bands", bands}, {"beyond", rings.beyond}};
}

json edge_json(const LineageEdge& e) {
  const auto a = edge_annotations(e);
  return {{"from_cluster", e.from_cluster},
          {"to_cluster", e.to_cluster},
          {"from_period", e.from_period},
          {"to_period", e.to_period},
          {"overlap", e.overlap},
          {"centroid_shift_km", e.centroid_shift_km},
          {"annotation",
           {{"transfers", a.transfers}, {"shift_km", a.shift_km}, {"label", a.label}}}};
}

json snapshot_json(const MonthlySnapshot& s) {
  return {{"month", s.month.to_string()},
          {"active_counts", s.active_counts},
          {"total", s.total()},
          {"model_features", s.model_features},
          {"projection_features", s.projection_features}};
}

json forecast_point_json(const ForecastPoint& p) {
  const auto bar = importance_bars(p);
  return {{"month", p.month.to_string()},
          {"actual", p.actual},
          {"predicted", p.predicted},
          {"base_value", p.base_value},
          {"attributions", p.attributions},
          {"bar", {{"magnitude", bar.magnitude}, {"sign", bar.sign}, {"empty", bar.empty}}}};
}

json snapshots_artifact(std::span<const MonthlySnapshot> snapshots,
                        std::span<const std::string> warnings, const Vocabularies& vocab) {
  json tiers = json::array();
  for (auto t : kTiers) tiers.push_back(tier_name_json(t));
  json rows = json::array();
  for (const auto& s : snapshots) rows.push_back(snapshot_json(s));
  return {{"schema", schema_id("snapshots")},
          {"tiers", tiers},
          {"feature_names", kFeatureNames},
          {"projection_layout",
           {{"classification_code", vocabulary_slots(vocab.classification)},
            {"property", vocabulary_slots(vocab.property)},
            {"state", vocabulary_slots(vocab.state)},
            {"credit_rating", vocabulary_slots(vocab.credit_rating)},
            {"capital", {"log10_mean", "log10_total"}}}},
          {"from", snapshots.empty() ? json(nullptr) : json(snapshots.front().month.to_string())},
          {"to", snapshots.empty() ? json(nullptr) : json(snapshots.back().month.to_string())},
          {"warnings", std::vector<std::string>(warnings.begin(), warnings.end())},
          {"snapshots", rows}};
}

json segments_artifact(const SegmentationResult& r) {
  json segments = json::array();
  for (const auto& s : r.segments) {
    segments.push_back({{"start_idx", s.start_idx},
                        {"end_idx", s.end_idx},
                        {"from", (r.first + static_cast<int>(s.start_idx)).to_string()},
                        {"to", (r.first + static_cast<int>(s.end_idx)).to_string()},
                        {"slope", s.fit.slope},
                        {"intercept", s.fit.intercept},
                        {"max_residual", s.max_residual}});
  }
  json periods = json::array();
  for (const auto& p : r.periods) {
    periods.push_back({{"index", p.index},
                       {"start_idx", p.start_idx},
                       {"end_idx", p.end_idx},
                       {"from", p.months.first.to_string()},
                       {"to", p.months.last.to_string()}});
  }
  return {{"schema", schema_id("segments")},
          {"series", r.series.to_string()},
          {"threshold", {{"spec", r.threshold.to_string()}, {"value", r.threshold_value}}},
          {"total_error", total_error(r.segments)},
          {"values", r.values},
          {"segments", segments},
          {"periods", periods}};
}

json clusters_artifact(std::span<const PeriodClusters> periods,
                       std::span<const EnterpriseRecord> records) {
  json out = json::array();
  for (const auto& pc : periods) {
    json sweep = json::array();
    for (const auto& s : pc.sweep) {
      sweep.push_back({{"eps_km", s.eps_km}, {"min_pts", s.min_pts}, {"clusters", s.clusters}});
    }
    json clusters = json::array();
    for (const auto& c : pc.clusters) {
      json ids = json::array();
      for (auto m : c.members) ids.push_back(records[m].id);
      clusters.push_back({{"id", c.id},
                          {"size", c.size()},
                          {"label", "core cluster"},
                          {"centroid", {{"lon", c.centroid.lon}, {"lat", c.centroid.lat}}},
                          {"member_ids", std::move(ids)}});
    }
    out.push_back({{"period", pc.period.index},
                   {"from", pc.period.months.first.to_string()},
                   {"to", pc.period.months.last.to_string()},
                   {"params", {{"eps_km", pc.params.eps_km}, {"min_pts", pc.params.min_pts}}},
                   {"auto_params", pc.auto_params},
                   {"stable", pc.stable},
                   {"sweep", sweep},
                   {"active_records", pc.active_records},
                   {"noise", pc.noise},
                   {"clusters", clusters}});
  }
  return {{"schema", schema_id("clusters")}, {"periods", out}};
}

json indicators_artifact(std::span<const ClusterMetrics> clusters,
                         std::span<const PathGrowth> growth) {
  json metrics = json::array();
  for (auto m : kMetrics) metrics.push_back(std::string(metric_name(m)));
  json rows = json::array();
  for (const auto& c : clusters) {
    json normalized = json::object();
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      normalized[std::string(metric_name(kMetrics[k]))] = c.normalized[k];
    }
    rows.push_back({{"id", c.id},
                    {"period", c.period},
                    {"as_of", format_date(c.as_of)},
                    {"indicators", indicator_json(c.indicators)},
                    {"normalized", normalized},
                    {"rings", ring_profile_json(c.rings)}});
  }
  json paths = json::array();
  for (const auto& g : growth) {
    json boxes = json::array();
    for (const auto& b : g.boxes) {
      json summary = nullptr;
      if (b.summary) {
        summary = {{"min", b.summary->min},
                   {"q1", b.summary->q1},
                   {"median", b.summary->median},
                   {"q3", b.summary->q3},
                   {"max", b.summary->max}};
      }
      boxes.push_back({{"period", b.period},
                       {"cluster_id", b.cluster_id},
                       {"tier", tier_name_json(b.tier)},
                       {"samples", b.samples},
                       {"skipped", b.skipped},
                       {"summary", summary}});
    }
    paths.push_back({{"path_id", g.path_id}, {"boxes", boxes}});
  }
  return {{"schema", schema_id("indicators")},
          {"metrics", metrics},
          {"clusters", rows},
          {"growth", paths}};
}

json paths_artifact(const Lineage& lineage) {
  json edges = json::array();
  for (const auto& e : lineage.edges) edges.push_back(edge_json(e));
  json paths = json::array();
  for (const auto& p : lineage.paths) {
    json pe = json::array();
    for (const auto& e : p.edges) pe.push_back(edge_json(e));
    paths.push_back({{"path_id", p.path_id},
                     {"clusters", p.clusters},
                     {"periods", p.periods},
                     {"edges", pe}});
  }
  json matrices = json::array();
  for (const auto& m : lineage.matrices) {
    matrices.push_back({{"from_period", m.from_period},
                        {"to_period", m.to_period},
                        {"rows", m.rows},
                        {"cols", m.cols},
                        {"counts", m.counts}});
  }
  return {{"schema", schema_id("paths")},
          {"edges", edges},
          {"paths", paths},
          {"overlap_matrices", matrices}};
}

json forecast_artifact(std::span<const ForecastRun> runs, const ForecastSettings& settings,
                       std::optional<Month> first_evaluation) {
  json out = json::array();
  for (const auto& run : runs) {
    json points = json::array();
    for (const auto& p : run.points) points.push_back(forecast_point_json(p));
    json fits = json::array();
    for (const auto& f : run.fits) {
      fits.push_back({{"evaluation_first", f.evaluation_first.to_string()},
                      {"evaluation_last", f.evaluation_last.to_string()},
                      {"train_first_target", f.train_first_target.to_string()},
                      {"train_last_target", f.train_last_target.to_string()},
                      {"pairs", f.pairs}});
    }
    json score = nullptr;
    try {
      const auto m = mape(run.points);
      score = {{"percent", m.percent}, {"used", m.used}, {"skipped", m.skipped}};
    } catch (const Error&) {
    }
    out.push_back({{"tier", tier_name_json(run.tier)},
                   {"model", std::string(model_name(run.model))},
                   {"mape", score},
                   {"fits", fits},
                   {"points", points}});
  }
  json models = json::array();
  for (auto m : settings.models) models.push_back(std::string(model_name(m)));
  return {{"schema", schema_id("forecast")},
          {"attribution_names", kAttributionNames},
          {"window", settings.window},
          {"initial_years", settings.initial_years},
          {"models", models},
          {"first_evaluation_month",
           first_evaluation ? json(first_evaluation->to_string()) : json(nullptr)},
          {"runs", out}};
}

json projection_artifact(const Projection& p) {
  json points = json::array();
  for (const auto& pt : p.points) {
    points.push_back({{"month", pt.month.to_string()},
                      {"x", pt.xy[0]},
                      {"y", pt.xy[1]},
                      {"order_index", pt.order_index}});
  }
  json chrono = nullptr;
  if (!p.points.empty()) {
    const auto c = chronology(p.points);
    chrono = {{"order", c.order},
              {"first", c.first},
              {"last", c.last},
              {"segments", c.segments()}};
  }
  return {{"schema", schema_id("projection")},
          {"settings",
           {{"perplexity", p.settings.perplexity},
            {"iterations", p.settings.iterations},
            {"exaggeration", p.settings.exaggeration},
            {"exaggeration_iterations", p.settings.exaggeration_iterations},
            {"learning_rate", p.tsne.learning_rate},
            {"seed", p.settings.seed}}},
          {"kl", p.tsne.kl},
          {"max_entropy_error", p.tsne.max_entropy_error},
          {"kl_trace", p.tsne.kl_trace},
          {"points", points},
          {"chronology", chrono}};
}

}  // namespace riseer
