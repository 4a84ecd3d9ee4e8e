#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riseer/geocluster.hpp"
#include "riseer/ingest.hpp"

namespace riseer {

/// Population CV = std / mean. Throws Error{undefined_cv} for an empty list
/// or zero mean.
double coefficient_of_variation(std::span<const double> values);

/// Aggregation index = 1 / CV. A zero CV (perfectly even distribution) is
/// reported as unbounded; a zero mean as undefined.
struct AggregationIndex {
  enum class Kind { Finite, Unbounded, Undefined };
  Kind kind = Kind::Undefined;
  double value = 0.0;  // meaningful for Finite only

  static AggregationIndex finite(double v) { return {Kind::Finite, v}; }
  static AggregationIndex unbounded() { return {Kind::Unbounded, 0.0}; }
  static AggregationIndex undefined() { return {Kind::Undefined, 0.0}; }
  /// +inf for unbounded, NaN for undefined.
  double as_double() const;
  bool operator==(const AggregationIndex&) const = default;
};

AggregationIndex aggregation_index(std::span<const double> values);

struct Livability {
  double livability = 0.0;
  double mortality = 0.0;
};

/// Share of members whose state is the surviving state and that have not
/// ended by as_of. Throws Error{empty_cluster} for no members.
Livability livability(std::span<const EnterpriseRecord> records,
                      std::span<const std::uint32_t> members, const Date& as_of,
                      std::string_view surviving_state = "surviving");

struct IndicatorSet {
  std::int64_t n_primary = 0;
  std::int64_t n_secondary = 0;
  std::int64_t n_tertiary = 0;
  AggregationIndex aggregation_index;
  double avg_capital = 0.0;
  double total_capital = 0.0;
  double credit_rating = 0.0;
  double livability = 0.0;
  double mortality = 0.0;

  std::int64_t members() const { return n_primary + n_secondary + n_tertiary; }
};

enum class Metric : std::uint8_t {
  NPrimary,
  NSecondary,
  NTertiary,
  AggregationIndex,
  AvgCapital,
  TotalCapital,
  CreditRating,
  Livability,
  Mortality,
};
inline constexpr std::size_t kMetricCount = 9;
inline constexpr std::array<Metric, kMetricCount> kMetrics{
    Metric::NPrimary,   Metric::NSecondary,   Metric::NTertiary,
    Metric::AggregationIndex, Metric::AvgCapital, Metric::TotalCapital,
    Metric::CreditRating, Metric::Livability,  Metric::Mortality};

std::string_view metric_name(Metric m) noexcept;
std::optional<Metric> parse_metric(std::string_view name);
double metric_value(const IndicatorSet& set, Metric m);

struct RingBand {
  double lo_km = 0.0;
  double hi_km = 0.0;  // exclusive
};

/// Default bands: [0,1.5), [1.5,2), [2,4), [4,6), [6,10) km.
std::vector<RingBand> default_rings();

struct RingProfile {
  std::vector<RingBand> bands;
  std::vector<std::vector<std::uint32_t>> members;  // per band
  std::vector<std::optional<IndicatorSet>> indicators;  // nullopt for empty bands
  std::size_t beyond = 0;  // members at or past the last band

  std::vector<double> counts() const;
};

enum class AiBasis { MemberCount, Capital };

struct MetricsOptions {
  std::vector<RingBand> rings = default_rings();
  std::string surviving_state = "surviving";
  CreditScale credit_scale;
  AiBasis ai_basis = AiBasis::MemberCount;
};

/// Buckets members by haversine distance to the centroid (half-open bands) and
/// computes indicators per band. Band-level aggregation indices are undefined.
RingProfile ring_profile(const RegionalCluster& cluster,
                         std::span<const EnterpriseRecord> records, const Date& as_of,
                         const MetricsOptions& options = {});

/// The nine indicators. The aggregation index is computed over the cluster's
/// per-band member counts (or per-band capital with AiBasis::Capital).
IndicatorSet indicator_set(const RegionalCluster& cluster,
                           std::span<const EnterpriseRecord> records, const Date& as_of,
                           const MetricsOptions& options = {});

/// Min-max normalisation into [0, 1]. A constant metric maps to 0.5. +inf maps
/// to 1 and NaN to 0; finite values are scaled over the finite ones.
std::vector<double> normalize_for_ranking(std::span<const double> values);

struct FiveNumber {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Linear-interpolation quartiles (position p * (n - 1) in sorted order).
FiveNumber five_number_summary(std::span<const double> values);

struct GrowthBox {
  std::size_t period = 0;
  std::string cluster_id;
  Tier tier = Tier::Primary;
  std::vector<double> samples;
  std::size_t skipped = 0;  // months with a zero previous count
  std::optional<FiveNumber> summary;
};

/// Month-over-month growth of each path cluster's members, per tier, over the
/// cluster's period. Throws Error{invalid_argument} for fewer than 2 clusters.
std::vector<GrowthBox> growth_rates(std::span<const RegionalCluster* const> path_clusters,
                                    std::span<const Period> periods,
                                    std::span<const EnterpriseRecord> records);

}  // namespace riseer
