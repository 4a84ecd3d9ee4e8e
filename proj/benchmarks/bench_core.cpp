#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "riseer/geocluster.hpp"
#include "riseer/projection.hpp"
#include "riseer/segmentation.hpp"
#include "riseer/synthgen.hpp"
#include "riseer/tree_shap.hpp"
#include "riseer/trees.hpp"

using namespace riseer;

namespace {

std::vector<LonLat> city_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.01);
  std::uniform_int_distribution<int> pick(0, 5);
  std::vector<LonLat> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = pick(rng);
    pts.push_back({114.0 + 0.05 * c + g(rng), 22.5 + 0.03 * (c % 3) + g(rng)});
  }
  return pts;
}

std::vector<double> regime(std::size_t months) {
  RegimeConfig rc;
  rc.seed = 5;
  rc.months = months;
  rc.start_level = 1000;
  rc.breakpoints = {months / 4, months / 2, 3 * months / 4};
  rc.slopes = {5.0, -5.0, 5.0, -5.0};
  rc.noise_fraction = 0.02;
  return regime_series(rc).values;
}

}  // namespace

static void BM_Dbscan(benchmark::State& state) {
  const auto pts = city_points(static_cast<std::size_t>(state.range(0)), 1);
  const ClusterParams params{0.3, 20};
  for (auto _ : state) benchmark::DoNotOptimize(dbscan(pts, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dbscan)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ParamSearch(benchmark::State& state) {
  const auto pts = city_points(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(search_params(pts));
}
BENCHMARK(BM_ParamSearch)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

static void BM_TopdownSegment(benchmark::State& state) {
  const auto y = regime(static_cast<std::size_t>(state.range(0)));
  const double eps = Threshold{Threshold::Kind::Fraction, 0.03}.resolve(y);
  for (auto _ : state) benchmark::DoNotOptimize(topdown_segment(y, eps));
}
BENCHMARK(BM_TopdownSegment)->Arg(432)->Arg(1200)->Unit(benchmark::kMicrosecond);

static void BM_TreeShap(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(400, 12);
  std::vector<double> y(400);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = g(rng);
    y[r] = std::sin(x(r, 0)) + x(r, 1) * x(r, 2) + 0.1 * g(rng);
  }
  BoostingParams params;
  params.trees = static_cast<std::size_t>(state.range(0));
  const auto model = fit_gradient_boosting(x, y, params);
  std::size_t row = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree_shap(model, x.row(row)));
    row = (row + 1) % x.rows();
  }
}
BENCHMARK(BM_TreeShap)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

static void BM_Tsne(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> vecs(static_cast<std::size_t>(state.range(0)),
                                        std::vector<double>(7));
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (auto& v : vecs[i]) v = g(rng) + static_cast<double>(i % 3) * 4.0;
  }
  TsneOptions options;
  options.iterations = 500;
  for (auto _ : state) benchmark::DoNotOptimize(tsne_embed(vecs, options));
}
BENCHMARK(BM_Tsne)->Arg(432)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
