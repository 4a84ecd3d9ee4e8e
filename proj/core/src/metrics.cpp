#include "riseer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "riseer/error.hpp"

namespace riseer {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Indicators without the aggregation index.
IndicatorSet base_indicators(std::span<const EnterpriseRecord> records,
                             std::span<const std::uint32_t> members, const Date& as_of,
                             const MetricsOptions& options) {
  IndicatorSet set;
  double credit = 0.0;
  std::size_t credit_n = 0;
  for (auto i : members) {
    const auto& r = records[i];
    switch (r.tier) {
      case Tier::Primary: ++set.n_primary; break;
      case Tier::Secondary: ++set.n_secondary; break;
      case Tier::Tertiary: ++set.n_tertiary; break;
    }
    set.total_capital += r.registered_capital;
    if (auto code = options.credit_scale.code(r.credit_rating)) {
      credit += *code;
      ++credit_n;
    }
  }
  set.avg_capital = set.total_capital / static_cast<double>(members.size());
  set.credit_rating = credit_n ? credit / static_cast<double>(credit_n) : 0.0;
  auto live = livability(records, members, as_of, options.surviving_state);
  set.livability = live.livability;
  set.mortality = live.mortality;
  return set;
}

}  // namespace

double coefficient_of_variation(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::undefined_cv, "CV of an empty list");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (mean == 0.0) throw Error(Errc::undefined_cv, "CV undefined for zero mean");
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n) / mean;
}

double AggregationIndex::as_double() const {
  switch (kind) {
    case Kind::Finite: return value;
    case Kind::Unbounded: return std::numeric_limits<double>::infinity();
    case Kind::Undefined: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AggregationIndex aggregation_index(std::span<const double> values) {
  double cv = 0.0;
  try {
    cv = coefficient_of_variation(values);
  } catch (const Error&) {
    return AggregationIndex::undefined();
  }
  if (cv == 0.0) return AggregationIndex::unbounded();
  return AggregationIndex::finite(1.0 / cv);
}

Livability livability(std::span<const EnterpriseRecord> records,
                      std::span<const std::uint32_t> members, const Date& as_of,
                      std::string_view surviving_state) {
  if (members.empty()) throw Error(Errc::empty_cluster, "livability of an empty cluster");
  std::size_t surviving = 0;
  for (auto i : members) {
    const auto& r = records[i];
    // Either signal suffices to mark death.
    if (iequals(r.state, surviving_state) && (!r.end_date || *r.end_date > as_of)) {
      ++surviving;
    }
  }
  Livability out;
  out.livability = static_cast<double>(surviving) / static_cast<double>(members.size());
  out.mortality = 1.0 - out.livability;
  return out;
}

std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::NPrimary: return "n_primary";
    case Metric::NSecondary: return "n_secondary";
    case Metric::NTertiary: return "n_tertiary";
    case Metric::AggregationIndex: return "aggregation_index";
    case Metric::AvgCapital: return "avg_capital";
    case Metric::TotalCapital: return "total_capital";
    case Metric::CreditRating: return "credit_rating";
    case Metric::Livability: return "livability";
    case Metric::Mortality: return "mortality";
  }
  return "";
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (auto m : kMetrics) {
    if (metric_name(m) == name) return m;
  }
  return std::nullopt;
}

double metric_value(const IndicatorSet& s, Metric m) {
  switch (m) {
    case Metric::NPrimary: return static_cast<double>(s.n_primary);
    case Metric::NSecondary: return static_cast<double>(s.n_secondary);
    case Metric::NTertiary: return static_cast<double>(s.n_tertiary);
    case Metric::AggregationIndex: return s.aggregation_index.as_double();
    case Metric::AvgCapital: return s.avg_capital;
    case Metric::TotalCapital: return s.total_capital;
    case Metric::CreditRating: return s.credit_rating;
    case Metric::Livability: return s.livability;
    case Metric::Mortality: return s.mortality;
  }
  return 0.0;
}

std::vector<RingBand> default_rings() {
  return {{0.0, 1.5}, {1.5, 2.0}, {2.0, 4.0}, {4.0, 6.0}, {6.0, 10.0}};
}

std::vector<double> RingProfile::counts() const {
  std::vector<double> out;
  for (const auto& m : members) out.push_back(static_cast<double>(m.size()));
  return out;
}

RingProfile ring_profile(const RegionalCluster& cluster,
                         std::span<const EnterpriseRecord> records, const Date& as_of,
                         const MetricsOptions& options) {
  RingProfile profile;
  profile.bands = options.rings;
  profile.members.resize(profile.bands.size());
  for (auto i : cluster.members) {
    const double d = haversine_km(cluster.centroid, {records[i].lon, records[i].lat});
    auto band = std::find_if(profile.bands.begin(), profile.bands.end(),
                             [d](const RingBand& b) { return d >= b.lo_km && d < b.hi_km; });
    if (band == profile.bands.end()) {
      ++profile.beyond;
    } else {
      profile.members[static_cast<std::size_t>(band - profile.bands.begin())].push_back(i);
    }
  }
  for (const auto& m : profile.members) {
    if (m.empty()) {
      profile.indicators.emplace_back();
    } else {
      profile.indicators.push_back(base_indicators(records, m, as_of, options));
    }
  }
  return profile;
}

IndicatorSet indicator_set(const RegionalCluster& cluster,
                           std::span<const EnterpriseRecord> records, const Date& as_of,
                           const MetricsOptions& options) {
  if (cluster.members.empty()) {
    throw Error(Errc::empty_cluster, "cluster " + cluster.id + " has no members");
  }
  IndicatorSet set = base_indicators(records, cluster.members, as_of, options);
  RingProfile rings = ring_profile(cluster, records, as_of, options);
  std::vector<double> basis;
  if (options.ai_basis == AiBasis::MemberCount) {
    basis = rings.counts();
  } else {
    for (const auto& band : rings.members) {
      double capital = 0.0;
      for (auto i : band) capital += records[i].registered_capital;
      basis.push_back(capital);
    }
  }
  set.aggregation_index = aggregation_index(basis);
  return set;
}

std::vector<double> normalize_for_ranking(std::span<const double> values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (std::isnan(v)) {
      out.push_back(0.0);
    } else if (std::isinf(v)) {
      out.push_back(v > 0 ? 1.0 : 0.0);
    } else if (hi > lo) {
      out.push_back(std::clamp((v - lo) / (hi - lo), 0.0, 1.0));
    } else {
      out.push_back(0.5);
    }
  }
  return out;
}

FiveNumber five_number_summary(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "five-number summary of nothing");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  };
  return {sorted.front(), quantile(0.25), quantile(0.5), quantile(0.75), sorted.back()};
}

std::vector<GrowthBox> growth_rates(std::span<const RegionalCluster* const> path_clusters,
                                    std::span<const Period> periods,
                                    std::span<const EnterpriseRecord> records) {
  if (path_clusters.size() < 2) {
    throw Error(Errc::invalid_argument, "growth rates need a path of at least 2 periods");
  }
  std::vector<GrowthBox> out;
  for (const RegionalCluster* cluster : path_clusters) {
    auto period = std::find_if(periods.begin(), periods.end(),
                               [&](const Period& p) { return p.index == cluster->period; });
    if (period == periods.end()) {
      throw Error(Errc::not_found, "period of cluster " + cluster->id + " not found");
    }
    const MonthRange months = period->months;
    const auto n = static_cast<std::size_t>(months.size());
    std::array<std::vector<std::int64_t>, kTierCount> counts;
    for (auto& c : counts) c.assign(n + 1, 0);
    for (auto i : cluster->members) {
      const auto& r = records[i];
      Month lo = std::max(r.start_month(), months.first);
      Month hi = months.last;
      if (auto end = r.end_month()) hi = std::min(hi, *end);
      if (lo > hi) continue;
      auto& diff = counts[static_cast<std::size_t>(r.tier)];
      ++diff[static_cast<std::size_t>(lo - months.first)];
      --diff[static_cast<std::size_t>(hi - months.first) + 1];
    }
    for (auto tier : kTiers) {
      auto& diff = counts[static_cast<std::size_t>(tier)];
      GrowthBox box;
      box.period = cluster->period;
      box.cluster_id = cluster->id;
      box.tier = tier;
      std::int64_t prev = 0;
      std::int64_t running = 0;
      for (std::size_t t = 0; t < n; ++t) {
        running += diff[t];
        if (t > 0) {
          if (prev == 0) {
            ++box.skipped;
          } else {
            box.samples.push_back(static_cast<double>(running - prev) /
                                  static_cast<double>(prev));
          }
        }
        prev = running;
      }
      if (!box.samples.empty()) box.summary = five_number_summary(box.samples);
      out.push_back(std::move(box));
    }
  }
  return out;
}

}  // namespace riseer
