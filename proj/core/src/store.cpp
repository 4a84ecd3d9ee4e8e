#include "riseer/store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "riseer/error.hpp"
#include "riseer/metrics.hpp"

namespace riseer {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

double json_metric(const json& indicators, std::string_view name) {
  const json& v = indicators.at(std::string(name));
  if (name == "aggregation_index") {
    const auto kind = v.at("kind").get<std::string>();
    if (kind == "finite") return v.at("value").get<double>();
    if (kind == "unbounded") return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

bool in_range(const json& row, const std::string& from, const std::string& to) {
  const auto& m = row.at("month").get_ref<const std::string&>();
  return from <= m && m <= to;
}

}  // namespace

std::shared_ptr<const ArtifactStore> ArtifactStore::open(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) {
    throw Error(Errc::not_found, "no store at " + dir.string());
  }
  std::shared_ptr<ArtifactStore> s(new ArtifactStore());
  s->dir_ = dir;
  s->manifest_ = read_json(dir / "manifest.json");
  for (const auto& [kind, entry] : s->manifest_.at("artifacts").items()) {
    s->artifacts_.emplace(kind, read_json(dir / entry.at("file").get<std::string>()));
  }
  {
    std::ifstream in(dir / "records.csv");
    if (!in) throw Error(Errc::io_error, "cannot read records of " + dir.string());
    auto parsed = parse_csv(in);
    s->records_ = std::move(parsed.records);
  }
  std::unordered_map<std::string, std::uint32_t> position;
  for (std::uint32_t i = 0; i < s->records_.size(); ++i) position.emplace(s->records_[i].id, i);

  std::unordered_map<std::string, const json*> metrics;
  for (const auto& m : s->artifact("indicators").at("clusters")) {
    metrics.emplace(m.at("id").get<std::string>(), &m);
  }
  for (const auto& period : s->artifact("clusters").at("periods")) {
    for (const auto& c : period.at("clusters")) {
      ClusterRef ref;
      ref.period = &period;
      ref.cluster = &c;
      const auto id = c.at("id").get<std::string>();
      auto m = metrics.find(id);
      if (m == metrics.end()) throw Error(Errc::parse_error, "no indicators for cluster " + id);
      ref.metrics = m->second;
      for (const auto& member : c.at("member_ids")) {
        auto p = position.find(member.get<std::string>());
        if (p == position.end()) throw Error(Errc::parse_error, "unknown member of " + id);
        ref.members.push_back(p->second);
      }
      std::sort(ref.members.begin(), ref.members.end());
      s->clusters_.emplace(id, std::move(ref));
    }
  }
  return s;
}

const json& ArtifactStore::artifact(std::string_view kind) const {
  auto it = artifacts_.find(std::string(kind));
  if (it == artifacts_.end()) throw Error(Errc::not_found, "no artifact " + std::string(kind));
  return it->second;
}

const ArtifactStore::ClusterRef& ArtifactStore::find_cluster(std::string_view id) const {
  auto it = clusters_.find(std::string(id));
  if (it == clusters_.end()) throw Error(Errc::not_found, "unknown cluster " + std::string(id));
  return it->second;
}

json ArtifactStore::query_range(Month from, Month to) const {
  if (to < from) throw Error(Errc::invalid_argument, "inverted month range");
  const std::string lo = from.to_string();
  const std::string hi = to.to_string();
  json snapshots = json::array();
  for (const auto& s : artifact("snapshots").at("snapshots")) {
    if (in_range(s, lo, hi)) snapshots.push_back(s);
  }
  json runs = json::array();
  for (const auto& run : artifact("forecast").at("runs")) {
    json points = json::array();
    for (const auto& p : run.at("points")) {
      if (in_range(p, lo, hi)) points.push_back(p);
    }
    runs.push_back({{"tier", run.at("tier")}, {"model", run.at("model")}, {"points", points}});
  }
  return {{"schema", "riseer.range.v1"},
          {"from", lo},
          {"to", hi},
          {"snapshots", snapshots},
          {"forecast", runs}};
}

json ArtifactStore::clusters(std::optional<std::size_t> period) const {
  json out = artifact("clusters");
  if (!period) return out;
  json kept = json::array();
  for (const auto& p : out.at("periods")) {
    if (p.at("period").get<std::size_t>() == *period) kept.push_back(p);
  }
  if (kept.empty()) throw Error(Errc::not_found, "unknown period " + std::to_string(*period));
  out["periods"] = kept;
  return out;
}

json ArtifactStore::forecast(std::optional<Tier> tier, std::optional<ModelKind> model) const {
  json out = artifact("forecast");
  json kept = json::array();
  for (const auto& run : out.at("runs")) {
    if (tier && run.at("tier").get<std::string>() != tier_name(*tier)) continue;
    if (model && run.at("model").get<std::string>() != model_name(*model)) continue;
    kept.push_back(run);
  }
  out["runs"] = kept;
  return out;
}

json ArtifactStore::cluster_details(std::string_view id, std::size_t grid) const {
  if (grid < 1) throw Error(Errc::invalid_argument, "grid must be >= 1");
  const ClusterRef& ref = find_cluster(id);
  const auto& snaps = artifact("snapshots").at("snapshots");

  json months = json::array();
  json registration = json::array();
  json live = json::array();
  const std::string surviving =
      manifest_.value("/config/surviving_state"_json_pointer, std::string("surviving"));
  std::vector<std::uint32_t> started;
  for (const auto& s : snaps) {
    const auto m = *Month::parse(s.at("month").get<std::string>());
    std::array<std::int64_t, kTierCount> counts{};
    started.clear();
    for (auto i : ref.members) {
      const auto& r = records_[i];
      if (r.active_in(m)) ++counts[static_cast<std::size_t>(r.tier)];
      if (r.start_month() <= m) started.push_back(i);
    }
    months.push_back(m.to_string());
    registration.push_back(counts);
    live.push_back(started.empty() ? json(nullptr)
                                   : json(livability(records_, started, m.last_day(), surviving)
                                              .livability));
  }

  std::map<std::string, std::int64_t> tiers;
  std::map<std::string, std::int64_t> codes;
  double lon_min = 180, lon_max = -180, lat_min = 90, lat_max = -90;
  for (auto i : ref.members) {
    const auto& r = records_[i];
    ++tiers[std::string(tier_name(r.tier))];
    ++codes[r.classification_code];
    lon_min = std::min(lon_min, r.lon);
    lon_max = std::max(lon_max, r.lon);
    lat_min = std::min(lat_min, r.lat);
    lat_max = std::max(lat_max, r.lat);
  }
  std::vector<std::vector<std::int64_t>> heat(grid, std::vector<std::int64_t>(grid, 0));
  auto bin = [grid](double v, double lo, double hi) {
    if (!(hi > lo)) return std::size_t{0};
    const auto b = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(grid)));
    return std::min(b, grid - 1);
  };
  for (auto i : ref.members) {
    const auto& r = records_[i];
    ++heat[bin(r.lat, lat_min, lat_max)][bin(r.lon, lon_min, lon_max)];
  }

  const json& c = *ref.cluster;
  return {{"schema", "riseer.cluster_details.v1"},
          {"id", c.at("id")},
          {"period", ref.period->at("period")},
          {"from", ref.period->at("from")},
          {"to", ref.period->at("to")},
          {"size", c.at("size")},
          {"centroid", c.at("centroid")},
          {"indicators", ref.metrics->at("indicators")},
          {"rings", ref.metrics->at("rings")},
          {"months", months},
          {"registration", registration},
          {"livability", live},
          {"categories", {{"tier", tiers}, {"classification_code", codes}}},
          {"heat_grid",
           {{"rows", grid},
            {"cols", grid},
            {"bbox", {{"lon", {lon_min, lon_max}}, {"lat", {lat_min, lat_max}}}},
            {"counts", heat}}}};
}

json ArtifactStore::compare_clusters(std::span<const std::string> ids) const {
  if (ids.size() < 2 || ids.size() > 3) {
    throw Error(Errc::invalid_argument, "comparison takes 2 or 3 cluster ids");
  }
  std::vector<const ClusterRef*> refs;
  for (const auto& id : ids) refs.push_back(&find_cluster(id));

  json metrics = json::array();
  json bounds = json::object();
  std::vector<json> normalized(refs.size(), json::object());
  for (auto m : kMetrics) {
    const std::string name(metric_name(m));
    metrics.push_back(name);
    std::vector<double> values;
    for (const auto* r : refs) values.push_back(json_metric(r->metrics->at("indicators"), name));
    const auto norm = normalize_for_ranking(values);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    bounds[name] = std::isfinite(lo) ? json{{"min", lo}, {"max", hi}}
                                     : json{{"min", nullptr}, {"max", nullptr}};
    for (std::size_t k = 0; k < refs.size(); ++k) normalized[k][name] = norm[k];
  }
  json clusters = json::array();
  for (std::size_t k = 0; k < refs.size(); ++k) {
    clusters.push_back({{"id", ids[k]},
                        {"period", refs[k]->period->at("period")},
                        {"indicators", refs[k]->metrics->at("indicators")},
                        {"normalized", normalized[k]},
                        {"rings", refs[k]->metrics->at("rings")}});
  }
  return {{"schema", "riseer.compare.v1"},
          {"ids", std::vector<std::string>(ids.begin(), ids.end())},
          {"metrics", metrics},
          {"bounds", bounds},
          {"clusters", clusters}};
}

}  // namespace riseer
