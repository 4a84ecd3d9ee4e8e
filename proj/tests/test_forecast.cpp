#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "riseer/error.hpp"
#include "riseer/forecast.hpp"
#include "riseer/synthgen.hpp"
#include "riseer/tree_shap.hpp"

using namespace riseer;

namespace {

RegressionTree stump(int feature, double threshold, double left, double right, double lc = 1,
                     double rc = 1) {
  std::vector<TreeNode> nodes(3);
  nodes[0] = {feature, threshold, 1, 2, 0.0, lc + rc};
  nodes[1] = {-1, 0.0, -1, -1, left, lc};
  nodes[2] = {-1, 0.0, -1, -1, right, rc};
  return RegressionTree(std::move(nodes));
}

std::vector<MonthlySnapshot> trend_snapshots(std::size_t n, double slope, std::uint64_t seed,
                                             double season = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 2.0);
  std::vector<double> counts;
  for (std::size_t i = 0; i < n; ++i) {
    counts.push_back(200 + slope * static_cast<double>(i) +
                     season * std::sin(2 * M_PI * static_cast<double>(i) / 12) + noise(rng));
  }
  return series_snapshots(counts, Month::of(1980, 1), Tier::Tertiary);
}

}  // namespace

TEST_CASE("supervised pairs") {
  auto snaps = series_snapshots(std::vector<double>{1, 2, 3, 4, 5}, Month::of(1990, 1), Tier::Primary);
  auto set = make_supervised(snaps, Tier::Primary, 2);
  REQUIRE(set.targets.size() == 3);
  CHECK(set.targets == std::vector<double>{3, 4, 5});
  CHECK(set.inputs.cols() == 16);
  // Row for target index 2: features of months 0 and 1, then counts 1, 2.
  auto row = set.inputs.row(0);
  CHECK(row[0] == 1990);
  CHECK(row[1] == 1);
  CHECK(row[7] == 1990);
  CHECK(row[8] == 2);
  CHECK(row[14] == 1);
  CHECK(row[15] == 2);
  CHECK(last_count_index(2) == 15);
  CHECK(feature_group(8, 2) == 1);
  CHECK(feature_group(15, 2) == kFeatureDims);

  auto flat = series_snapshots(std::vector<double>(8, 6.0), Month::of(1990, 1), Tier::Primary);
  for (double t : make_supervised(flat, Tier::Primary, 3).targets) CHECK(t == 6.0);
  CHECK_THROWS_AS(make_supervised(snaps, Tier::Primary, 5), Error);
}

TEST_CASE("regression trees") {
  SUBCASE("single pair predicts its target") {
    Matrix x;
    x.append_row(std::vector<double>{1.0, 2.0});
    std::vector<double> y{7.0}, w{1.0};
    auto tree = fit_tree(x, y, w, {}, 1);
    CHECK(tree.predict(std::vector<double>{100, -3}) == 7.0);
  }
  SUBCASE("step data fits at least as well as the mean") {
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
      x.append_row(std::vector<double>{static_cast<double>(i)});
      y.push_back(i < 20 ? 1.0 : 5.0);
    }
    std::vector<double> w(40, 1.0);
    auto tree = fit_tree(x, y, w, {.max_depth = 2}, 1);
    double mse = 0;
    for (int i = 0; i < 40; ++i) mse += std::pow(tree.predict(x.row(i)) - y[i], 2);
    CHECK(mse / 40 <= 4.0);
    CHECK(mse == doctest::Approx(0.0));
    CHECK(tree.nodes()[0].threshold == 19.5);
  }
  SUBCASE("boosting and forest are seeded") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 100; ++i) {
      std::vector<double> row{u(rng), u(rng), u(rng)};
      y.push_back(3 * row[0] - row[1] + 0.1 * u(rng));
      x.append_row(row);
    }
    auto g1 = fit_gradient_boosting(x, y, {});
    auto g2 = fit_gradient_boosting(x, y, {});
    auto f1 = fit_random_forest(x, y, {.trees = 20});
    auto f2 = fit_random_forest(x, y, {.trees = 20});
    for (int i = 0; i < 100; ++i) {
      CHECK(g1.predict(x.row(i)) == g2.predict(x.row(i)));
      CHECK(f1.predict(x.row(i)) == f2.predict(x.row(i)));
    }
  }
}

TEST_CASE("tree_shap") {
  SUBCASE("balanced stump") {
    TreeEnsemble m;
    m.trees.push_back(stump(0, 0.5, 10, 20));
    std::vector<double> lo(7, 0.0), hi(7, 0.0);
    hi[0] = 1.0;
    auto a = tree_shap(m, lo);
    CHECK(a.base_value == doctest::Approx(15));
    CHECK(a.phi[0] == doctest::Approx(-5));
    auto b = tree_shap(m, hi);
    CHECK(b.phi[0] == doctest::Approx(5));
    for (std::size_t i = 1; i < 7; ++i) CHECK(b.phi[i] == 0.0);
  }
  SUBCASE("constant model") {
    TreeEnsemble m;
    m.bias = 4.0;
    m.trees.push_back(RegressionTree({TreeNode{-1, 0, -1, -1, 3.0, 10.0}}));
    auto s = tree_shap(m, std::vector<double>{1, 2, 3});
    CHECK(s.base_value == 7.0);
    for (double p : s.phi) CHECK(p == 0.0);
  }
  SUBCASE("stump ensembles match exhaustive Shapley") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0, 1), val(-10, 10), cov(1, 50);
    std::uniform_int_distribution<int> feat(0, 6);
    for (int trial = 0; trial < 30; ++trial) {
      TreeEnsemble m;
      m.bias = val(rng);
      for (int t = 0; t < 3; ++t) {
        m.trees.push_back(stump(feat(rng), u(rng), val(rng), val(rng), cov(rng), cov(rng)));
      }
      std::vector<double> x(7);
      for (auto& v : x) v = u(rng);
      auto s = tree_shap(m, x);
      auto ref = oracle::exhaustive_shapley(m, x);
      for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(s.phi[i] - ref[i]) <= 1e-6);
    }
  }
  SUBCASE("deep fitted trees match exhaustive Shapley and stay additive") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0, 1);
    Matrix x;
    std::vector<double> y;
    for (int i = 0; i < 200; ++i) {
      std::vector<double> row(6);
      for (auto& v : row) v = u(rng);
      y.push_back(row[0] * row[1] + (row[2] > 0.5 ? 2 : 0) + row[3]);
      x.append_row(row);
    }
    auto model = fit_gradient_boosting(x, y, {.trees = 3, .tree = {4, 1.0, 0}});
    for (int i = 0; i < 10; ++i) {
      auto s = tree_shap(model, x.row(static_cast<std::size_t>(i)));
      auto ref = oracle::exhaustive_shapley(model, x.row(static_cast<std::size_t>(i)));
      double sum = s.base_value;
      for (std::size_t f = 0; f < 6; ++f) {
        CHECK(std::abs(s.phi[f] - ref[f]) <= 1e-6);
        sum += s.phi[f];
      }
      CHECK(std::abs(sum - model.predict(x.row(static_cast<std::size_t>(i)))) <= 1e-9);
    }
  }
}

TEST_CASE("forecast schedule and additivity") {
  auto snaps = trend_snapshots(16 * 12, 1.5, 3, 10.0);
  ForecastConfig cfg;
  cfg.trees = 20;
  auto run = expanding_window_forecast(snaps, Tier::Tertiary, cfg);
  REQUIRE(!run.points.empty());
  CHECK(run.points.front().month == Month::of(1991, 1));
  CHECK(run.points.back().month == Month::of(1995, 12));
  CHECK(run.fits.size() == 5);
  for (const auto& fit : run.fits) {
    CHECK(fit.train_last_target < fit.evaluation_first);
    CHECK(fit.evaluation_first.month() == 1);
  }
  for (const auto& p : run.points) {
    double sum = p.base_value;
    for (double a : p.attributions) sum += a;
    CHECK(std::abs(sum - p.predicted) <= 1e-6);
  }
  auto again = expanding_window_forecast(snaps, Tier::Tertiary, cfg);
  for (std::size_t i = 0; i < run.points.size(); ++i) {
    CHECK(again.points[i].predicted == run.points[i].predicted);
  }

  ForecastConfig monthly = cfg;
  monthly.refit = RefitSchedule::Monthly;
  monthly.model = ModelKind::NaiveLast;
  auto m = expanding_window_forecast(snaps, Tier::Tertiary, monthly);
  CHECK(m.fits.size() == m.points.size());
}

TEST_CASE("first evaluation month") {
  auto snaps = series_snapshots(std::vector<double>(432, 1.0), Month::of(1980, 1), Tier::Primary);
  CHECK(first_evaluation_month(snaps, 11) == Month::of(1991, 1));
  auto short_series = series_snapshots(std::vector<double>(24, 1.0), Month::of(1980, 1), Tier::Primary);
  CHECK_THROWS_AS(expanding_window_forecast(short_series, Tier::Primary, {}), Error);
}

TEST_CASE("naive model on a constant series") {
  auto snaps = series_snapshots(std::vector<double>(180, 42.0), Month::of(1980, 1), Tier::Secondary);
  ForecastConfig cfg;
  cfg.model = ModelKind::NaiveLast;
  auto run = expanding_window_forecast(snaps, Tier::Secondary, cfg);
  for (const auto& p : run.points) {
    CHECK(p.predicted == 42.0);
    CHECK(p.base_value == 42.0);
  }
  CHECK(mape(run.points).percent == 0.0);
}

TEST_CASE("gbt beats naive in training on a trend") {
  auto snaps = trend_snapshots(212, 2.0, 5);
  auto set = make_supervised(snaps, Tier::Tertiary, 12);
  REQUIRE(set.targets.size() == 200);
  ForecastConfig g;
  ForecastConfig n;
  n.model = ModelKind::NaiveLast;
  auto gm = ForecastModel::fit(g, set, 1);
  auto nm = ForecastModel::fit(n, set, 1);
  std::vector<ForecastPoint> gp, np;
  for (std::size_t r = 0; r < set.targets.size(); ++r) {
    gp.push_back({Month{}, Tier::Tertiary, set.targets[r], gm.predict(set.inputs.row(r))});
    np.push_back({Month{}, Tier::Tertiary, set.targets[r], nm.predict(set.inputs.row(r))});
  }
  CHECK(mape(gp).percent < mape(np).percent);
}

TEST_CASE("mape") {
  std::vector<ForecastPoint> pts(2);
  pts[0].actual = 100;
  pts[0].predicted = 110;
  pts[1].actual = 200;
  pts[1].predicted = 180;
  CHECK(mape(pts).percent == doctest::Approx(10.0));
  pts.push_back({});
  auto r = mape(pts);
  CHECK(r.skipped == 1);
  CHECK(r.used == 2);
  std::vector<ForecastPoint> zeros(3);
  try {
    mape(zeros);
    FAIL("expected mape_undefined");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::mape_undefined);
  }
}

TEST_CASE("importance bars") {
  ForecastPoint p;
  p.attributions = {3, -1, 0, 0, 0, 0, 0, 0};
  auto bar = importance_bars(p);
  CHECK_FALSE(bar.empty);
  CHECK(bar.magnitude[0] == 0.75);
  CHECK(bar.magnitude[1] == 0.25);
  CHECK(bar.sign[0] == 1);
  CHECK(bar.sign[1] == -1);
  CHECK(bar.sign[2] == 0);
  ForecastPoint single;
  single.attributions[5] = -2;
  CHECK(importance_bars(single).magnitude[5] == 1.0);
  CHECK(importance_bars(ForecastPoint{}).empty);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    ForecastPoint q;
    for (auto& a : q.attributions) a = g(rng);
    auto b = importance_bars(q);
    double s = 0;
    for (double m : b.magnitude) s += m;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}
