#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "riseer/calendar.hpp"
#include "riseer/geo.hpp"
#include "riseer/ingest.hpp"

namespace riseer {

/// Piecewise-linear schedule over month offsets from the span start.
struct RateCurve {
  std::vector<std::pair<int, double>> knots;  // (month offset, value), ascending

  double at(int offset) const;
  /// First offset with a positive value, if any.
  std::optional<int> first_positive() const;
};

struct MergeSpec {
  std::size_t with = 0;  // target blob
  int month = 0;         // offset from span start
};

struct BlobSpec {
  LonLat center;
  double sigma_km = 1.0;
  RateCurve birth_rate;             // expected births per month
  double seasonal_amplitude = 0.0;  // relative modulation of the birth rate
  double death_hazard = 0.0;        // monthly closing probability
  std::array<double, kTierCount> tier_mix{0.1, 0.3, 0.6};
  double capital_log10_mean = 2.5;
  double capital_log10_sd = 0.4;
  std::array<double, 2> drift_km_per_year{0.0, 0.0};  // east, north
  std::optional<MergeSpec> merge;
};

struct ScenarioConfig {
  std::uint64_t seed = 7;
  MonthRange span{Month::of(1980, 1), Month::of(2015, 12)};
  std::array<double, 2> bbox_lon{113.8, 114.5};
  std::array<double, 2> bbox_lat{22.45, 22.85};
  double noise_rate = 0.0;  // share of births placed uniformly in the bbox
  std::vector<BlobSpec> blobs;

  /// Throws Error{invalid_argument} for negative rates, sigma <= 0, an empty
  /// span, or a merge scheduled before either blob is born.
  void validate() const;
};

ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& config);

struct MergeEvent {
  std::size_t blob = 0;
  std::size_t with = 0;
  Month month;
};

struct GroundTruth {
  std::vector<int> blob_of_record;  // -1 for noise records
  std::vector<Month> regime_changes;  // interior birth-rate knots
  std::vector<MergeEvent> merges;
};

struct Scenario {
  std::vector<EnterpriseRecord> records;
  GroundTruth truth;
};

nlohmann::json ground_truth_to_json(const GroundTruth& truth,
                                    std::span<const EnterpriseRecord> records);

/// Deterministic synthetic registry. Blob centres move by their drift; after a
/// merge month a blob's births are spread along the segment towards the
/// target blob so the two grow into one density region.
Scenario generate(const ScenarioConfig& config);

/// Planted piecewise-linear series: slope k holds from breakpoint k-1
/// (exclusive) to breakpoint k (inclusive), so each breakpoint is the vertex.
struct RegimeConfig {
  std::uint64_t seed = 7;
  std::size_t months = 432;
  double start_level = 100.0;
  std::vector<std::size_t> breakpoints;
  std::vector<double> slopes{1.0};  // breakpoints.size() + 1 entries
  double noise_fraction = 0.0;      // uniform noise bound, share of schedule range
  double seasonal_amplitude = 0.0;
  std::size_t seasonal_period = 12;
};

struct RegimeSeries {
  std::vector<double> values;
  std::vector<double> schedule;  // noiseless piecewise-linear part (+ season)
  std::vector<std::size_t> breakpoints;
  double noise_bound = 0.0;
};

RegimeSeries regime_series(const RegimeConfig& config);

/// Wraps a count series as monthly snapshots of one tier; feature vectors
/// carry year and month, other dimensions are zero.
std::vector<MonthlySnapshot> series_snapshots(std::span<const double> counts, Month first,
                                              Tier tier);

}  // namespace riseer
