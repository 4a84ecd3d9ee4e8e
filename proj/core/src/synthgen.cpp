#include "riseer/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "riseer/error.hpp"

namespace riseer {
namespace {

constexpr double kKmPerDegree = kEarthRadiusKm * std::numbers::pi / 180.0;

struct TierCodes {
  std::array<std::vector<std::string>, kTierCount> codes{
      std::vector<std::string>{"A01", "A02", "A03"},
      std::vector<std::string>{"C13", "C26", "C34", "C39", "E47"},
      std::vector<std::string>{"F51", "G54", "I65", "J66", "L72", "M73"}};
};

const std::array<std::string, 4> kProperties{"private", "state-owned", "foreign", "collective"};
const std::array<std::string, 4> kCredit{"A", "B", "C", "D"};
constexpr std::array<double, 4> kCreditWeights{0.4, 0.3, 0.2, 0.1};

LonLat offset_km(const LonLat& origin, double east_km, double north_km) {
  const double cos_lat = std::cos(origin.lat * std::numbers::pi / 180.0);
  return {origin.lon + east_km / (kKmPerDegree * std::max(cos_lat, 1e-6)),
          origin.lat + north_km / kKmPerDegree};
}

LonLat center_at(const BlobSpec& blob, int offset) {
  const double years = static_cast<double>(offset) / 12.0;
  return offset_km(blob.center, blob.drift_km_per_year[0] * years,
                   blob.drift_km_per_year[1] * years);
}

std::string record_id(std::size_t seq) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "E%08zu", seq);
  return buf;
}

Month month_at(const ScenarioConfig& c, int offset) { return c.span.first + offset; }

}  // namespace

double RateCurve::at(int offset) const {
  if (knots.empty()) return 0.0;
  if (offset <= knots.front().first) return knots.front().second;
  if (offset >= knots.back().first) return knots.back().second;
  auto hi = std::upper_bound(knots.begin(), knots.end(), offset,
                             [](int o, const auto& k) { return o < k.first; });
  auto lo = hi - 1;
  const double t = static_cast<double>(offset - lo->first) /
                   static_cast<double>(hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

std::optional<int> RateCurve::first_positive() const {
  if (knots.empty()) return std::nullopt;
  if (knots.front().second > 0.0) return knots.front().first;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].second > 0.0) return knots[i - 1].first + 1;
  }
  return std::nullopt;
}

void ScenarioConfig::validate() const {
  if (span.last < span.first) throw Error(Errc::invalid_argument, "empty scenario span");
  if (noise_rate < 0.0 || noise_rate > 1.0) {
    throw Error(Errc::invalid_argument, "noise_rate must lie in [0, 1]");
  }
  for (std::size_t b = 0; b < blobs.size(); ++b) {
    const auto& blob = blobs[b];
    const std::string where = "blob " + std::to_string(b) + ": ";
    if (!(blob.sigma_km > 0.0)) throw Error(Errc::invalid_argument, where + "sigma must be > 0");
    if (blob.death_hazard < 0.0 || blob.death_hazard > 1.0) {
      throw Error(Errc::invalid_argument, where + "death hazard must lie in [0, 1]");
    }
    for (std::size_t k = 0; k < blob.birth_rate.knots.size(); ++k) {
      if (blob.birth_rate.knots[k].second < 0.0) {
        throw Error(Errc::invalid_argument, where + "negative birth rate");
      }
      if (k > 0 && blob.birth_rate.knots[k].first <= blob.birth_rate.knots[k - 1].first) {
        throw Error(Errc::invalid_argument, where + "birth-rate knots must ascend");
      }
    }
    double mix = 0.0;
    for (double w : blob.tier_mix) {
      if (w < 0.0) throw Error(Errc::invalid_argument, where + "negative tier weight");
      mix += w;
    }
    if (!(mix > 0.0)) throw Error(Errc::invalid_argument, where + "tier mix sums to zero");
    if (blob.merge) {
      const auto& m = *blob.merge;
      if (m.with >= blobs.size() || m.with == b) {
        throw Error(Errc::invalid_argument, where + "merge target does not exist");
      }
      if (m.month < 0 || m.month >= span.size()) {
        throw Error(Errc::invalid_argument, where + "merge month outside the span");
      }
      auto born = blob.birth_rate.first_positive();
      auto other = blobs[m.with].birth_rate.first_positive();
      if (!born || !other || m.month < *born || m.month < *other) {
        throw Error(Errc::invalid_argument, where + "merge scheduled before birth");
      }
    }
  }
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  c.seed = j.value("seed", c.seed);
  if (j.contains("span")) {
    auto from = Month::parse(j.at("span").at("from").get<std::string>());
    auto to = Month::parse(j.at("span").at("to").get<std::string>());
    if (!from || !to) throw Error(Errc::invalid_argument, "bad scenario span");
    c.span = {*from, *to};
  }
  if (j.contains("bbox")) {
    c.bbox_lon = j.at("bbox").at("lon").get<std::array<double, 2>>();
    c.bbox_lat = j.at("bbox").at("lat").get<std::array<double, 2>>();
  }
  c.noise_rate = j.value("noise_rate", c.noise_rate);
  for (const auto& b : j.value("blobs", nlohmann::json::array())) {
    BlobSpec blob;
    auto center = b.at("center").get<std::array<double, 2>>();
    blob.center = {center[0], center[1]};
    blob.sigma_km = b.value("sigma_km", blob.sigma_km);
    for (const auto& k : b.at("birth_rate")) {
      blob.birth_rate.knots.emplace_back(k.at(0).get<int>(), k.at(1).get<double>());
    }
    blob.seasonal_amplitude = b.value("seasonal_amplitude", 0.0);
    blob.death_hazard = b.value("death_hazard", 0.0);
    if (b.contains("tier_mix")) blob.tier_mix = b.at("tier_mix").get<std::array<double, 3>>();
    if (b.contains("capital")) {
      blob.capital_log10_mean = b.at("capital").value("log10_mean", blob.capital_log10_mean);
      blob.capital_log10_sd = b.at("capital").value("log10_sd", blob.capital_log10_sd);
    }
    if (b.contains("drift_km_per_year")) {
      blob.drift_km_per_year = b.at("drift_km_per_year").get<std::array<double, 2>>();
    }
    if (b.contains("merge") && !b.at("merge").is_null()) {
      blob.merge = MergeSpec{b.at("merge").at("with").get<std::size_t>(),
                             b.at("merge").at("month").get<int>()};
    }
    c.blobs.push_back(std::move(blob));
  }
  c.validate();
  return c;
}

nlohmann::json scenario_to_json(const ScenarioConfig& c) {
  nlohmann::json blobs = nlohmann::json::array();
  for (const auto& b : c.blobs) {
    nlohmann::json knots = nlohmann::json::array();
    for (auto [o, v] : b.birth_rate.knots) knots.push_back({o, v});
    nlohmann::json blob{{"center", {b.center.lon, b.center.lat}},
                        {"sigma_km", b.sigma_km},
                        {"birth_rate", knots},
                        {"seasonal_amplitude", b.seasonal_amplitude},
                        {"death_hazard", b.death_hazard},
                        {"tier_mix", b.tier_mix},
                        {"capital", {{"log10_mean", b.capital_log10_mean},
                                     {"log10_sd", b.capital_log10_sd}}},
                        {"drift_km_per_year", b.drift_km_per_year}};
    if (b.merge) blob["merge"] = {{"with", b.merge->with}, {"month", b.merge->month}};
    blobs.push_back(std::move(blob));
  }
  return {{"seed", c.seed},
          {"span", {{"from", c.span.first.to_string()}, {"to", c.span.last.to_string()}}},
          {"bbox", {{"lon", c.bbox_lon}, {"lat", c.bbox_lat}}},
          {"noise_rate", c.noise_rate},
          {"blobs", blobs}};
}

nlohmann::json ground_truth_to_json(const GroundTruth& truth,
                                    std::span<const EnterpriseRecord> records) {
  nlohmann::json labels = nlohmann::json::object();
  for (std::size_t i = 0; i < records.size(); ++i) labels[records[i].id] = truth.blob_of_record[i];
  nlohmann::json regimes = nlohmann::json::array();
  for (auto m : truth.regime_changes) regimes.push_back(m.to_string());
  nlohmann::json merges = nlohmann::json::array();
  for (const auto& m : truth.merges) {
    merges.push_back({{"blob", m.blob}, {"with", m.with}, {"month", m.month.to_string()}});
  }
  return {{"schema", "riseer.groundtruth.v1"},
          {"labels", labels},
          {"regime_changes", regimes},
          {"merges", merges}};
}

Scenario generate(const ScenarioConfig& config) {
  config.validate();
  Scenario out;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<unsigned> day(1, 28);
  std::discrete_distribution<std::size_t> credit(kCreditWeights.begin(), kCreditWeights.end());
  std::uniform_int_distribution<std::size_t> property(0, kProperties.size() - 1);
  const TierCodes codes;

  std::vector<std::discrete_distribution<std::size_t>> tiers;
  for (const auto& b : config.blobs) tiers.emplace_back(b.tier_mix.begin(), b.tier_mix.end());

  const int months = config.span.size();
  for (int t = 0; t < months; ++t) {
    const Month m = month_at(config, t);
    for (std::size_t b = 0; b < config.blobs.size(); ++b) {
      const auto& blob = config.blobs[b];
      double rate = blob.birth_rate.at(t);
      if (blob.seasonal_amplitude != 0.0) {
        rate *= 1.0 + blob.seasonal_amplitude *
                          std::sin(2.0 * std::numbers::pi * (m.month() - 1) / 12.0);
      }
      if (!(rate > 0.0)) continue;
      const auto births = std::poisson_distribution<int>(rate)(rng);
      const LonLat center = center_at(blob, t);
      for (int k = 0; k < births; ++k) {
        EnterpriseRecord r;
        int label = static_cast<int>(b);
        LonLat where;
        if (config.noise_rate > 0.0 && unit(rng) < config.noise_rate) {
          label = -1;
          where = {config.bbox_lon[0] + unit(rng) * (config.bbox_lon[1] - config.bbox_lon[0]),
                   config.bbox_lat[0] + unit(rng) * (config.bbox_lat[1] - config.bbox_lat[0])};
        } else {
          LonLat base = center;
          if (blob.merge && t >= blob.merge->month) {
            const LonLat target = center_at(config.blobs[blob.merge->with], t);
            const double u = unit(rng);
            base = {center.lon + u * (target.lon - center.lon),
                    center.lat + u * (target.lat - center.lat)};
          }
          const double east = gauss(rng) * blob.sigma_km;
          const double north = gauss(rng) * blob.sigma_km;
          where = offset_km(base, east, north);
        }
        r.lon = std::clamp(where.lon, -180.0, 180.0);
        r.lat = std::clamp(where.lat, -90.0, 90.0);
        r.id = record_id(out.records.size());
        r.tier = kTiers[tiers[b](rng)];
        const auto& tier_codes = codes.codes[static_cast<std::size_t>(r.tier)];
        r.classification_code =
            tier_codes[std::uniform_int_distribution<std::size_t>(0, tier_codes.size() - 1)(rng)];
        r.registered_capital =
            std::pow(10.0, blob.capital_log10_mean + blob.capital_log10_sd * gauss(rng));
        r.credit_rating = kCredit[credit(rng)];
        r.property = kProperties[property(rng)];
        const unsigned start_day = day(rng);
        r.start_date = Date{std::chrono::year{m.year()},
                            std::chrono::month{static_cast<unsigned>(m.month())},
                            std::chrono::day{start_day}};
        r.state = "surviving";
        if (blob.death_hazard > 0.0) {
          const auto survived = std::geometric_distribution<int>(blob.death_hazard)(rng);
          const long long death = static_cast<long long>(t) + 1 + survived;
          if (death < months) {
            const Month dm = month_at(config, static_cast<int>(death));
            r.end_date = Date{std::chrono::year{dm.year()},
                              std::chrono::month{static_cast<unsigned>(dm.month())},
                              std::chrono::day{day(rng)}};
            r.state = "cancelled";
          }
        }
        out.records.push_back(std::move(r));
        out.truth.blob_of_record.push_back(label);
      }
    }
  }

  std::set<Month> regimes;
  for (std::size_t b = 0; b < config.blobs.size(); ++b) {
    const auto& knots = config.blobs[b].birth_rate.knots;
    for (std::size_t k = 1; k + 1 < knots.size(); ++k) {
      if (knots[k].first > 0 && knots[k].first < months) {
        regimes.insert(month_at(config, knots[k].first));
      }
    }
    if (const auto& merge = config.blobs[b].merge) {
      out.truth.merges.push_back({b, merge->with, month_at(config, merge->month)});
    }
  }
  out.truth.regime_changes.assign(regimes.begin(), regimes.end());
  return out;
}

RegimeSeries regime_series(const RegimeConfig& config) {
  if (config.slopes.size() != config.breakpoints.size() + 1) {
    throw Error(Errc::invalid_argument, "need one more slope than breakpoints");
  }
  for (std::size_t k = 0; k < config.breakpoints.size(); ++k) {
    if (config.breakpoints[k] == 0 || config.breakpoints[k] >= config.months ||
        (k > 0 && config.breakpoints[k] <= config.breakpoints[k - 1])) {
      throw Error(Errc::invalid_argument, "breakpoints must ascend inside the series");
    }
  }
  if (config.noise_fraction < 0.0) throw Error(Errc::invalid_argument, "negative noise");

  RegimeSeries out;
  out.breakpoints = config.breakpoints;
  out.schedule.resize(config.months);
  double level = config.start_level;
  std::size_t regime = 0;
  for (std::size_t i = 0; i < config.months; ++i) {
    if (i > 0) {
      while (regime < config.breakpoints.size() && i > config.breakpoints[regime]) ++regime;
      level += config.slopes[regime];
    }
    double season = 0.0;
    if (config.seasonal_amplitude != 0.0 && config.seasonal_period > 0) {
      season = config.seasonal_amplitude *
               std::sin(2.0 * std::numbers::pi * static_cast<double>(i) /
                        static_cast<double>(config.seasonal_period));
    }
    out.schedule[i] = level + season;
  }
  if (config.months == 0) return out;
  auto [mn, mx] = std::minmax_element(out.schedule.begin(), out.schedule.end());
  out.noise_bound = config.noise_fraction * (*mx - *mn);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> noise(-out.noise_bound, out.noise_bound);
  out.values.resize(config.months);
  for (std::size_t i = 0; i < config.months; ++i) {
    out.values[i] = out.schedule[i] + (out.noise_bound > 0.0 ? noise(rng) : 0.0);
  }
  return out;
}

std::vector<MonthlySnapshot> series_snapshots(std::span<const double> counts, Month first,
                                              Tier tier) {
  std::vector<MonthlySnapshot> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    MonthlySnapshot s;
    s.month = first + static_cast<int>(i);
    s.active_counts[static_cast<std::size_t>(tier)] =
        std::max<std::int64_t>(0, std::llround(counts[i]));
    s.model_features[0] = static_cast<double>(s.month.year());
    s.model_features[1] = static_cast<double>(s.month.month());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace riseer
