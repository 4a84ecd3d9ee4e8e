#include "riseer/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "riseer/error.hpp"

namespace riseer {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw Error(Errc::parse_error, std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error(Errc::parse_error, "unknown key " + std::string(where) + "." + key);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Month parse_month(const json& j, std::string_view what) {
  auto m = Month::parse(j.get<std::string>());
  if (!m) throw Error(Errc::parse_error, "bad month in " + std::string(what));
  return *m;
}

ModelSettings read_model(const json& j, std::string_view where, ModelSettings s) {
  check_keys(j, where, {"trees", "depth", "learning_rate", "subsample"});
  read(j, "trees", s.trees);
  read(j, "depth", s.max_depth);
  read(j, "learning_rate", s.learning_rate);
  read(j, "subsample", s.subsample);
  return s;
}

json model_json(const ModelSettings& s) {
  return {{"trees", s.trees},
          {"depth", s.max_depth},
          {"learning_rate", s.learning_rate},
          {"subsample", s.subsample}};
}

}  // namespace

ForecastConfig ForecastSettings::for_model(ModelKind kind) const {
  ForecastConfig c;
  c.window = window;
  c.model = kind;
  const ModelSettings& s = kind == ModelKind::RandomForest ? rf : gbt;
  c.trees = s.trees;
  c.max_depth = s.max_depth;
  c.learning_rate = s.learning_rate;
  c.subsample = s.subsample;
  c.min_leaf_weight = min_leaf_weight;
  c.seed = seed;
  c.initial_years = initial_years;
  c.refit = refit;
  c.target = target;
  return c;
}

MetricsOptions PipelineConfig::metrics_options() const {
  MetricsOptions m;
  m.rings = rings;
  m.surviving_state = surviving_state;
  m.credit_scale = CreditScale(credit_scale);
  m.ai_basis = ai_basis;
  return m;
}

void PipelineConfig::validate() const {
  if (span && span->last < span->first) throw Error(Errc::invalid_argument, "inverted span");
  if (credit_scale.empty()) throw Error(Errc::invalid_argument, "empty credit scale");
  if (!(segmentation.threshold.value > 0.0)) {
    throw Error(Errc::invalid_argument, "segmentation threshold must be positive");
  }
  if (segmentation.max_periods < 1) throw Error(Errc::invalid_argument, "max_periods must be >= 1");
  if (clustering.manual) {
    if (!(clustering.manual->eps_km > 0.0) || clustering.manual->min_pts < 2) {
      throw Error(Errc::invalid_argument, "manual eps must be > 0 and min_pts >= 2");
    }
  }
  if (clustering.k_max < 1) throw Error(Errc::invalid_argument, "k_max must be >= 1");
  if (rings.empty()) throw Error(Errc::invalid_argument, "at least one ring band required");
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (!(rings[i].hi_km > rings[i].lo_km) || (i > 0 && rings[i].lo_km != rings[i - 1].hi_km)) {
      throw Error(Errc::invalid_argument, "ring bands must be contiguous and ascending");
    }
  }
  if (evolution.min_overlap < 1 || evolution.min_overlap_fraction < 0.0 ||
      evolution.min_overlap_fraction > 1.0) {
    throw Error(Errc::invalid_argument, "bad evolution overlap threshold");
  }
  for (auto kind : forecast.models) forecast.for_model(kind).validate();
  if (!(projection.perplexity > 0.0) || projection.iterations < 1 ||
      projection.exaggeration_iterations > projection.iterations) {
    throw Error(Errc::invalid_argument, "bad projection settings");
  }
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  check_keys(j, "config", {"span", "credit_scale", "surviving_state", "segmentation",
                           "clustering", "metrics", "evolution", "forecast", "projection"});
  if (j.contains("span") && !j.at("span").is_null()) {
    const auto& s = j.at("span");
    check_keys(s, "span", {"from", "to"});
    c.span = MonthRange{parse_month(s.at("from"), "span"), parse_month(s.at("to"), "span")};
  }
  read(j, "credit_scale", c.credit_scale);
  read(j, "surviving_state", c.surviving_state);
  if (j.contains("segmentation")) {
    const auto& s = j.at("segmentation");
    check_keys(s, "segmentation", {"threshold", "series", "max_periods", "min_period_months"});
    if (s.contains("threshold")) {
      const auto& t = s.at("threshold");
      if (t.is_number()) {
        c.segmentation.threshold = {Threshold::Kind::Fraction, t.get<double>()};
      } else {
        c.segmentation.threshold = Threshold::parse(t.get<std::string>());
      }
    }
    if (s.contains("series")) c.segmentation.series = SeriesSelector::parse(s.at("series").get<std::string>());
    read(s, "max_periods", c.segmentation.max_periods);
    read(s, "min_period_months", c.segmentation.min_period_months);
  }
  if (j.contains("clustering")) {
    const auto& s = j.at("clustering");
    check_keys(s, "clustering", {"k_max", "eps_km", "min_pts"});
    read(s, "k_max", c.clustering.k_max);
    const bool eps = s.contains("eps_km") && !s.at("eps_km").is_null();
    const bool pts = s.contains("min_pts") && !s.at("min_pts").is_null();
    if (eps != pts) throw Error(Errc::parse_error, "eps_km and min_pts must be given together");
    if (eps) c.clustering.manual = ClusterParams{s.at("eps_km").get<double>(), s.at("min_pts").get<std::size_t>()};
  }
  if (j.contains("metrics")) {
    const auto& s = j.at("metrics");
    check_keys(s, "metrics", {"rings_km", "ai_basis"});
    if (s.contains("rings_km")) {
      auto edges = s.at("rings_km").get<std::vector<double>>();
      if (edges.size() < 2) throw Error(Errc::parse_error, "rings_km needs at least two edges");
      c.rings.clear();
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) c.rings.push_back({edges[i], edges[i + 1]});
    }
    if (s.contains("ai_basis")) {
      const auto basis = s.at("ai_basis").get<std::string>();
      if (basis == "members") c.ai_basis = AiBasis::MemberCount;
      else if (basis == "capital") c.ai_basis = AiBasis::Capital;
      else throw Error(Errc::parse_error, "ai_basis must be members or capital");
    }
  }
  if (j.contains("evolution")) {
    const auto& s = j.at("evolution");
    check_keys(s, "evolution", {"min_overlap", "min_overlap_fraction"});
    read(s, "min_overlap", c.evolution.min_overlap);
    read(s, "min_overlap_fraction", c.evolution.min_overlap_fraction);
  }
  if (j.contains("forecast")) {
    const auto& s = j.at("forecast");
    check_keys(s, "forecast", {"window", "models", "tiers", "rf", "gbt", "min_leaf_weight", "seed",
                               "initial_years", "refit", "target"});
    auto& f = c.forecast;
    read(s, "window", f.window);
    if (s.contains("models")) {
      f.models.clear();
      for (const auto& name : s.at("models")) {
        auto kind = parse_model(name.get<std::string>());
        if (!kind) throw Error(Errc::parse_error, "unknown model " + name.get<std::string>());
        f.models.push_back(*kind);
      }
    }
    if (s.contains("tiers")) {
      f.tiers.clear();
      for (const auto& name : s.at("tiers")) {
        auto tier = parse_tier(name.get<std::string>());
        if (!tier) throw Error(Errc::parse_error, "unknown tier " + name.get<std::string>());
        f.tiers.push_back(*tier);
      }
    }
    if (s.contains("rf")) f.rf = read_model(s.at("rf"), "forecast.rf", f.rf);
    if (s.contains("gbt")) f.gbt = read_model(s.at("gbt"), "forecast.gbt", f.gbt);
    read(s, "min_leaf_weight", f.min_leaf_weight);
    read(s, "seed", f.seed);
    read(s, "initial_years", f.initial_years);
    if (s.contains("refit")) {
      const auto v = s.at("refit").get<std::string>();
      if (v == "yearly") f.refit = RefitSchedule::Yearly;
      else if (v == "monthly") f.refit = RefitSchedule::Monthly;
      else throw Error(Errc::parse_error, "refit must be yearly or monthly");
    }
    if (s.contains("target")) {
      const auto v = s.at("target").get<std::string>();
      if (v == "delta") f.target = TargetMode::Delta;
      else if (v == "level") f.target = TargetMode::Level;
      else throw Error(Errc::parse_error, "target must be delta or level");
    }
  }
  if (j.contains("projection")) {
    const auto& s = j.at("projection");
    check_keys(s, "projection", {"perplexity", "iterations", "exaggeration",
                                 "exaggeration_iterations", "learning_rate", "seed"});
    read(s, "perplexity", c.projection.perplexity);
    read(s, "iterations", c.projection.iterations);
    read(s, "exaggeration", c.projection.exaggeration);
    read(s, "exaggeration_iterations", c.projection.exaggeration_iterations);
    read(s, "learning_rate", c.projection.learning_rate);
    read(s, "seed", c.projection.seed);
  }
  c.validate();
  return c;
}

json PipelineConfig::to_json() const {
  json models = json::array();
  for (auto m : forecast.models) models.push_back(model_name(m));
  json tiers = json::array();
  for (auto t : forecast.tiers) tiers.push_back(tier_name(t));
  std::vector<double> edges{rings.front().lo_km};
  for (const auto& r : rings) edges.push_back(r.hi_km);
  json cluster_json{{"k_max", clustering.k_max}, {"eps_km", nullptr}, {"min_pts", nullptr}};
  if (clustering.manual) {
    cluster_json["eps_km"] = clustering.manual->eps_km;
    cluster_json["min_pts"] = clustering.manual->min_pts;
  }
  return {
      {"span", span ? json{{"from", span->first.to_string()}, {"to", span->last.to_string()}}
                    : json(nullptr)},
      {"credit_scale", credit_scale},
      {"surviving_state", surviving_state},
      {"segmentation",
       {{"threshold", segmentation.threshold.to_string()},
        {"series", segmentation.series.to_string()},
        {"max_periods", segmentation.max_periods},
        {"min_period_months", segmentation.min_period_months}}},
      {"clustering", cluster_json},
      {"metrics",
       {{"rings_km", edges}, {"ai_basis", ai_basis == AiBasis::Capital ? "capital" : "members"}}},
      {"evolution",
       {{"min_overlap", evolution.min_overlap},
        {"min_overlap_fraction", evolution.min_overlap_fraction}}},
      {"forecast",
       {{"window", forecast.window},
        {"models", models},
        {"tiers", tiers},
        {"rf", model_json(forecast.rf)},
        {"gbt", model_json(forecast.gbt)},
        {"min_leaf_weight", forecast.min_leaf_weight},
        {"seed", forecast.seed},
        {"initial_years", forecast.initial_years},
        {"refit", forecast.refit == RefitSchedule::Yearly ? "yearly" : "monthly"},
        {"target", forecast.target == TargetMode::Delta ? "delta" : "level"}}},
      {"projection",
       {{"perplexity", projection.perplexity},
        {"iterations", projection.iterations},
        {"exaggeration", projection.exaggeration},
        {"exaggeration_iterations", projection.exaggeration_iterations},
        {"learning_rate", projection.learning_rate},
        {"seed", projection.seed}}},
  };
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, "config " + path.string() + ": " + e.what());
  }
  return PipelineConfig::from_json(j);
}

}  // namespace riseer
