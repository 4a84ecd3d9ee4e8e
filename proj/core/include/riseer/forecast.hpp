#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riseer/ingest.hpp"
#include "riseer/trees.hpp"

namespace riseer {

enum class ModelKind { RandomForest, GradientBoostedTrees, NaiveLast };

std::string_view model_name(ModelKind kind) noexcept;  // "rf" | "gbt" | "naive"
std::optional<ModelKind> parse_model(std::string_view name);

enum class RefitSchedule { Yearly, Monthly };

/// What the trees learn. Delta models the month-over-month change and adds it
/// to the last observed count, so trend levels outside the training range stay
/// reachable; Level regresses the count itself.
enum class TargetMode { Delta, Level };

struct ForecastConfig {
  std::size_t window = 12;  // L
  ModelKind model = ModelKind::GradientBoostedTrees;
  std::size_t trees = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  double subsample = 0.8;
  double min_leaf_weight = 2.0;
  std::uint64_t seed = 7;
  int initial_years = 11;
  RefitSchedule refit = RefitSchedule::Yearly;
  TargetMode target = TargetMode::Delta;

  /// Throws Error{invalid_argument} when a field is out of range.
  void validate() const;
};

/// Attribution groups: the seven FeatureVector dimensions summed over the
/// window, plus the lagged registration counts of the forecast tier.
inline constexpr std::size_t kAttributionGroups = kFeatureDims + 1;
inline constexpr std::array<std::string_view, kAttributionGroups> kAttributionNames{
    "year", "month", "classification_code", "registered_capital",
    "credit_rating", "property", "state", "registrations"};
using Attributions = std::array<double, kAttributionGroups>;

/// Input layout: window FeatureVectors oldest first (7 * L values), then the
/// window's tier counts oldest first (L values).
std::size_t feature_group(std::size_t input_index, std::size_t window);
std::size_t last_count_index(std::size_t window);

struct SupervisedSet {
  Matrix inputs;
  std::vector<double> targets;
  std::vector<std::size_t> target_index;  // snapshot index of each target
};

/// Builds window input for a target at snapshot t (uses t-L .. t-1).
std::vector<double> window_input(std::span<const MonthlySnapshot> snapshots, Tier tier,
                                 std::size_t window, std::size_t t);

/// One pair per admissible n: inputs are snapshots n-L+1..n, target n+1.
/// Throws Error{insufficient_history} with fewer than L + 1 snapshots.
SupervisedSet make_supervised(std::span<const MonthlySnapshot> snapshots, Tier tier,
                              std::size_t window);

/// Trained forecaster. For tree models the prediction is
///   offset + ensemble(x), offset = x[last count] in delta mode, 0 otherwise.
class ForecastModel {
 public:
  ForecastModel() = default;

  ModelKind kind() const { return kind_; }
  double predict(std::span<const double> x) const;
  const TreeEnsemble& ensemble() const { return ensemble_; }

  struct Explanation {
    double base_value = 0.0;
    std::vector<double> phi;  // per input feature
  };
  /// Exact additive attribution. The delta offset is linear in its input, so
  /// its Shapley value is x - E[x] with E[x] over the training rows.
  Explanation explain(std::span<const double> x) const;

  static ForecastModel fit(const ForecastConfig& config, const SupervisedSet& data,
                           std::uint64_t seed);

 private:
  ModelKind kind_ = ModelKind::NaiveLast;
  TreeEnsemble ensemble_;
  std::optional<std::size_t> offset_feature_;
  double offset_mean_ = 0.0;
  std::size_t naive_feature_ = 0;
};

struct ForecastPoint {
  Month month;
  Tier tier = Tier::Primary;
  double actual = 0.0;
  double predicted = 0.0;
  double base_value = 0.0;
  Attributions attributions{};
};

/// Training extent of one refit, kept for the leakage audit.
struct FitRecord {
  Month evaluation_first;
  Month evaluation_last;
  Month train_first_target;
  Month train_last_target;
  std::size_t pairs = 0;
};

struct ForecastRun {
  Tier tier = Tier::Primary;
  ModelKind model = ModelKind::NaiveLast;
  std::vector<ForecastPoint> points;
  std::vector<FitRecord> fits;
};

/// Month of the first forecast: January of (first year + initial_years).
Month first_evaluation_month(std::span<const MonthlySnapshot> snapshots, int initial_years);

/// Expanding-window single-step forecast: every evaluation block (a year, or a
/// month with monthly refits) is predicted by a model fit on all pairs whose
/// target precedes the block.
ForecastRun expanding_window_forecast(std::span<const MonthlySnapshot> snapshots, Tier tier,
                                      const ForecastConfig& config);

struct MapeResult {
  double percent = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;  // zero actuals
};

/// Mean absolute percentage error. Throws Error{mape_undefined} when every
/// actual is zero (or there are no points).
MapeResult mape(std::span<const ForecastPoint> points);

struct ImportanceBar {
  std::array<double, kAttributionGroups> magnitude{};  // L1-normalised
  std::array<int, kAttributionGroups> sign{};          // -1, 0, +1
  bool empty = true;
};

ImportanceBar importance_bars(const ForecastPoint& point);

}  // namespace riseer
