#include "riseer/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "riseer/error.hpp"
#include "riseer/tree_shap.hpp"

namespace riseer {
namespace {

Matrix head_rows(const Matrix& m, std::size_t rows) {
  Matrix out;
  for (std::size_t r = 0; r < rows; ++r) out.append_row(m.row(r));
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{seed, a, b};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

std::string_view model_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::RandomForest: return "rf";
    case ModelKind::GradientBoostedTrees: return "gbt";
    case ModelKind::NaiveLast: return "naive";
  }
  return "naive";
}

std::optional<ModelKind> parse_model(std::string_view name) {
  if (name == "rf") return ModelKind::RandomForest;
  if (name == "gbt") return ModelKind::GradientBoostedTrees;
  if (name == "naive") return ModelKind::NaiveLast;
  return std::nullopt;
}

void ForecastConfig::validate() const {
  if (window < 1) throw Error(Errc::invalid_argument, "window L must be >= 1");
  if (trees < 1 || max_depth < 1) throw Error(Errc::invalid_argument, "trees and depth must be positive");
  if (!(learning_rate > 0.0) || !(subsample > 0.0) || subsample > 1.0 ||
      !(min_leaf_weight > 0.0)) {
    throw Error(Errc::invalid_argument, "learning rate, subsample and leaf weight must be positive");
  }
  if (initial_years < 1) throw Error(Errc::invalid_argument, "initial_years must be >= 1");
}

std::size_t feature_group(std::size_t input_index, std::size_t window) {
  return input_index < kFeatureDims * window ? input_index % kFeatureDims : kFeatureDims;
}

std::size_t last_count_index(std::size_t window) { return kFeatureDims * window + window - 1; }

std::vector<double> window_input(std::span<const MonthlySnapshot> snapshots, Tier tier,
                                 std::size_t window, std::size_t t) {
  if (t < window || t > snapshots.size()) {
    throw Error(Errc::insufficient_history, "window does not fit before target");
  }
  std::vector<double> x;
  x.reserve((kFeatureDims + 1) * window);
  for (std::size_t k = t - window; k < t; ++k) {
    const auto& f = snapshots[k].model_features;
    x.insert(x.end(), f.begin(), f.end());
  }
  for (std::size_t k = t - window; k < t; ++k) {
    x.push_back(static_cast<double>(snapshots[k].count(tier)));
  }
  return x;
}

SupervisedSet make_supervised(std::span<const MonthlySnapshot> snapshots, Tier tier,
                              std::size_t window) {
  if (window < 1) throw Error(Errc::invalid_argument, "window L must be >= 1");
  if (snapshots.size() < window + 1) {
    throw Error(Errc::insufficient_history, "need at least L + 1 snapshots");
  }
  SupervisedSet set;
  for (std::size_t t = window; t < snapshots.size(); ++t) {
    set.inputs.append_row(window_input(snapshots, tier, window, t));
    set.targets.push_back(static_cast<double>(snapshots[t].count(tier)));
    set.target_index.push_back(t);
  }
  return set;
}

double ForecastModel::predict(std::span<const double> x) const {
  if (kind_ == ModelKind::NaiveLast) return x[naive_feature_];
  const double offset = offset_feature_ ? x[*offset_feature_] : 0.0;
  return offset + ensemble_.predict(x);
}

ForecastModel::Explanation ForecastModel::explain(std::span<const double> x) const {
  Explanation out;
  if (kind_ == ModelKind::NaiveLast) {
    out.phi.assign(x.size(), 0.0);
    out.base_value = predict(x);
    return out;
  }
  ShapValues shap = tree_shap(ensemble_, x);
  out.base_value = shap.base_value;
  out.phi = std::move(shap.phi);
  if (offset_feature_) {
    out.base_value += offset_mean_;
    out.phi[*offset_feature_] += x[*offset_feature_] - offset_mean_;
  }
  return out;
}

ForecastModel ForecastModel::fit(const ForecastConfig& config, const SupervisedSet& data,
                                 std::uint64_t seed) {
  config.validate();
  if (data.targets.empty()) throw Error(Errc::insufficient_history, "no training pairs");
  ForecastModel model;
  model.kind_ = config.model;
  const std::size_t window = data.inputs.cols() / (kFeatureDims + 1);
  model.naive_feature_ = last_count_index(window);
  if (config.model == ModelKind::NaiveLast) return model;

  std::vector<double> y = data.targets;
  if (config.target == TargetMode::Delta) {
    const std::size_t f = last_count_index(window);
    model.offset_feature_ = f;
    double sum = 0.0;
    for (std::size_t r = 0; r < y.size(); ++r) {
      y[r] -= data.inputs(r, f);
      sum += data.inputs(r, f);
    }
    model.offset_mean_ = sum / static_cast<double>(y.size());
  }

  if (config.model == ModelKind::RandomForest) {
    ForestParams params;
    params.trees = config.trees;
    params.tree.max_depth = config.max_depth;
    params.tree.min_leaf_weight = config.min_leaf_weight;
    params.seed = seed;
    model.ensemble_ = fit_random_forest(data.inputs, y, params);
  } else {
    BoostingParams params;
    params.trees = config.trees;
    params.learning_rate = config.learning_rate;
    params.subsample = config.subsample;
    params.tree.max_depth = config.max_depth;
    params.tree.min_leaf_weight = config.min_leaf_weight;
    params.seed = seed;
    model.ensemble_ = fit_gradient_boosting(data.inputs, y, params);
  }
  return model;
}

Month first_evaluation_month(std::span<const MonthlySnapshot> snapshots, int initial_years) {
  if (snapshots.empty()) throw Error(Errc::insufficient_history, "no snapshots");
  return Month::of(snapshots.front().month.year() + initial_years, 1);
}

ForecastRun expanding_window_forecast(std::span<const MonthlySnapshot> snapshots, Tier tier,
                                      const ForecastConfig& config) {
  config.validate();
  ForecastRun run;
  run.tier = tier;
  run.model = config.model;
  const SupervisedSet all = make_supervised(snapshots, tier, config.window);
  const Month first = snapshots.front().month;
  const Month last = snapshots.back().month;
  const Month eval_first = first_evaluation_month(snapshots, config.initial_years);
  if (eval_first > last) {
    throw Error(Errc::insufficient_history,
                "span ends before the first evaluation month " + eval_first.to_string());
  }

  std::size_t block = 0;
  for (Month start = eval_first; start <= last; ++block) {
    Month end = config.refit == RefitSchedule::Yearly ? Month::of(start.year(), 12) : start;
    end = std::min(end, last);

    // Pairs are ordered by target, so the training set is a prefix.
    const std::size_t start_idx = static_cast<std::size_t>(start - first);
    const auto rows = static_cast<std::size_t>(
        std::lower_bound(all.target_index.begin(), all.target_index.end(), start_idx) -
        all.target_index.begin());
    if (rows == 0) {
      throw Error(Errc::insufficient_history,
                  "no training pairs before " + start.to_string());
    }
    SupervisedSet train;
    train.inputs = head_rows(all.inputs, rows);
    train.targets.assign(all.targets.begin(), all.targets.begin() + static_cast<std::ptrdiff_t>(rows));
    train.target_index.assign(all.target_index.begin(),
                              all.target_index.begin() + static_cast<std::ptrdiff_t>(rows));
    const ForecastModel model = ForecastModel::fit(
        config, train, derive_seed(config.seed, static_cast<std::uint64_t>(tier), block));
    run.fits.push_back({start, end, first + static_cast<int>(train.target_index.front()),
                        first + static_cast<int>(train.target_index.back()), rows});

    for (Month m = start; m <= end; ++m) {
      const auto t = static_cast<std::size_t>(m - first);
      const auto x = window_input(snapshots, tier, config.window, t);
      ForecastPoint point;
      point.month = m;
      point.tier = tier;
      point.actual = static_cast<double>(snapshots[t].count(tier));
      point.predicted = model.predict(x);
      auto explanation = model.explain(x);
      point.base_value = explanation.base_value;
      for (std::size_t i = 0; i < explanation.phi.size(); ++i) {
        point.attributions[feature_group(i, config.window)] += explanation.phi[i];
      }
      run.points.push_back(point);
    }
    start = end + 1;
  }
  return run;
}

MapeResult mape(std::span<const ForecastPoint> points) {
  MapeResult out;
  double sum = 0.0;
  for (const auto& p : points) {
    if (p.actual == 0.0) {
      ++out.skipped;
      continue;
    }
    sum += std::abs(p.actual - p.predicted) / std::abs(p.actual);
    ++out.used;
  }
  if (out.used == 0) throw Error(Errc::mape_undefined, "MAPE undefined: no non-zero actuals");
  out.percent = 100.0 * sum / static_cast<double>(out.used);
  return out;
}

ImportanceBar importance_bars(const ForecastPoint& point) {
  ImportanceBar bar;
  double total = 0.0;
  for (double a : point.attributions) total += std::abs(a);
  if (total == 0.0) return bar;
  bar.empty = false;
  for (std::size_t i = 0; i < kAttributionGroups; ++i) {
    const double a = point.attributions[i];
    bar.magnitude[i] = std::abs(a) / total;
    bar.sign[i] = a > 0.0 ? 1 : (a < 0.0 ? -1 : 0);
  }
  return bar;
}

}  // namespace riseer
