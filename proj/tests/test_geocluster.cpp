#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "riseer/error.hpp"
#include "riseer/geocluster.hpp"

using namespace riseer;

namespace {

const LonLat kOrigin{114.05, 22.54};

std::vector<LonLat> line_points(std::initializer_list<double> km) {
  std::vector<LonLat> out;
  for (double k : km) out.push_back(oracle::offset_km({114.0, 0.0}, k, 0.0));
  return out;
}

}  // namespace

TEST_CASE("haversine") {
  CHECK(haversine_km({0, 0}, {0, 0}) == 0.0);
  CHECK(haversine_km({0, 0}, {0, 1}) == doctest::Approx(111.19492664455873).epsilon(1e-12));
  CHECK(haversine_km({114.05, 22.54}, {113.92, 22.55}) ==
        doctest::Approx(13.396869966182573).epsilon(1e-12));
}

TEST_CASE("grid queries agree with brute force") {
  std::mt19937_64 rng(21);
  auto pts = oracle::blob(kOrigin, 3.0, 300, rng);
  GeoGrid grid(pts, 1.0);
  for (std::size_t i = 0; i < pts.size(); i += 17) {
    std::size_t brute = 0;
    for (const auto& q : pts) brute += oracle::haversine(pts[i], q) <= 2.5;
    CHECK(grid.count_within(i, 2.5) == brute);
    auto knn = grid.knn_distances(i, 5);
    std::vector<double> row;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) row.push_back(oracle::haversine(pts[i], pts[j]));
    }
    std::sort(row.begin(), row.end());
    REQUIRE(knn.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(knn[k] == doctest::Approx(row[k]).epsilon(1e-9));
  }
}

TEST_CASE("eps_candidates") {
  CHECK_THROWS_AS(eps_candidates(line_points({0})), Error);
  auto two = eps_candidates(line_points({0, 1}));
  REQUIRE(two.size() == 1);
  CHECK(two[0] == doctest::Approx(1.0).epsilon(1e-6));
  auto three = eps_candidates(line_points({0, 1, 2}));
  REQUIRE(three.size() == 2);
  CHECK(three[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(three[1] == doctest::Approx(5.0 / 3.0).epsilon(1e-6));

  std::mt19937_64 rng(8);
  auto pts = oracle::blob(kOrigin, 2.0, 120, rng);
  auto got = eps_candidates(pts, 10);
  auto ref = oracle::knn_curve(pts, 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-9));
}

TEST_CASE("minpts_for_eps") {
  CHECK(minpts_for_eps(line_points({0, 1, 2}), 1.5) == 2);
  std::vector<LonLat> same(10, kOrigin);
  CHECK(minpts_for_eps(same, 0.1) == 10);
  CHECK(minpts_for_eps(line_points({0, 500}), 0.01) == 2);
}

TEST_CASE("dbscan") {
  SUBCASE("two tight blobs") {
    std::mt19937_64 rng(1);
    auto pts = oracle::blob(kOrigin, 0.1, 50, rng);
    auto b = oracle::blob(oracle::offset_km(kOrigin, 14, 0), 0.1, 50, rng);
    pts.insert(pts.end(), b.begin(), b.end());
    auto r = dbscan(pts, {1.0, 5});
    CHECK(r.clusters == 2);
    CHECK(std::count(r.labels.begin(), r.labels.end(), kNoise) == 0);
    CHECK(oracle::same_partition(r.labels, oracle::dbscan(pts, 1.0, 5)));
  }
  SUBCASE("all points farther than eps") {
    auto pts = line_points({0, 5, 10, 15});
    auto r = dbscan(pts, {1.0, 2});
    CHECK(r.clusters == 0);
    for (int l : r.labels) CHECK(l == kNoise);
  }
  SUBCASE("exact label equality with the oracle on random data") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<LonLat> pts;
      for (int c = 0; c < 4; ++c) {
        auto b = oracle::blob(oracle::offset_km(kOrigin, 4.0 * c, 1.5 * c), 0.8, 40, rng);
        pts.insert(pts.end(), b.begin(), b.end());
      }
      std::shuffle(pts.begin(), pts.end(), rng);
      auto r = dbscan(pts, {0.6, 4});
      CHECK(r.labels == oracle::dbscan(pts, 0.6, 4));
    }
  }
  SUBCASE("deterministic") {
    std::mt19937_64 rng(5);
    auto pts = oracle::blob(kOrigin, 1.0, 200, rng);
    CHECK(dbscan(pts, {0.3, 4}).labels == dbscan(pts, {0.3, 4}).labels);
  }
}

TEST_CASE("parameter search") {
  SUBCASE("two far-separated tight blobs") {
    std::mt19937_64 rng(2);
    auto pts = oracle::blob(kOrigin, 0.2, 60, rng);
    auto b = oracle::blob(oracle::offset_km(kOrigin, 20, 0), 0.2, 60, rng);
    pts.insert(pts.end(), b.begin(), b.end());
    auto search = search_params(pts);
    CHECK(search.stable);
    REQUIRE(search.stable_count == 2);
    CHECK(dbscan(pts, search.params).clusters == 2);
    REQUIRE(search.sweep.size() >= 3);
    CHECK(search.params.eps_km == search.sweep.back().eps_km);
    CHECK(search.params.min_pts == search.sweep.back().min_pts);
    for (std::size_t k = search.sweep.size() - 3; k < search.sweep.size(); ++k) {
      CHECK(search.sweep[k].clusters == 2);
    }
    for (const auto& step : search.sweep) {
      CHECK(step.clusters == dbscan(pts, {step.eps_km, step.min_pts}).clusters);
    }
  }
  SUBCASE("single tight blob") {
    std::mt19937_64 rng(3);
    auto pts = oracle::blob(kOrigin, 0.2, 80, rng);
    auto p = stable_params(pts);
    CHECK(dbscan(pts, p).clusters == 1);
  }
  SUBCASE("too few points") {
    CHECK_THROWS_AS(stable_params(line_points({0, 1, 2})), Error);
  }
}

TEST_CASE("kmeans_centroid") {
  CHECK(kmeans_centroid(std::vector<LonLat>{{3, 4}}) == LonLat{3, 4});
  auto c = kmeans_centroid(std::vector<LonLat>{{0, 0}, {0, 2}});
  CHECK(c.lon == 0.0);
  CHECK(c.lat == 1.0);
  CHECK_THROWS_AS(kmeans_centroid(std::vector<LonLat>{}), Error);
}

TEST_CASE("cluster_period") {
  auto make = [](const std::vector<LonLat>& pts) {
    std::vector<EnterpriseRecord> records;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      records.push_back(fixture::record("E" + std::to_string(i), pts[i].lon, pts[i].lat,
                                        "1990-01-01"));
    }
    return records;
  };
  Period period{0, 0, 11, {Month::of(1990, 1), Month::of(1990, 12)}};
  SUBCASE("no actives") {
    std::vector<EnterpriseRecord> none;
    auto pc = cluster_period(none, period);
    CHECK(pc.clusters.empty());
    CHECK(pc.active_records == 0);
  }
  SUBCASE("blob plus stragglers") {
    std::mt19937_64 rng(4);
    auto pts = oracle::blob(kOrigin, 0.15, 50, rng);
    pts.push_back(oracle::offset_km(kOrigin, 30, 0));
    pts.push_back(oracle::offset_km(kOrigin, -30, 5));
    pts.push_back(oracle::offset_km(kOrigin, 0, 40));
    auto records = make(pts);
    ClusterOptions opt;
    opt.manual = ClusterParams{1.0, 5};
    auto pc = cluster_period(records, period, opt);
    REQUIRE(pc.clusters.size() == 1);
    CHECK(pc.clusters[0].size() == 50);
    CHECK(pc.noise == 3);
    CHECK(pc.clusters[0].id == cluster_id(0, 0));
    auto centroid = pc.clusters[0].centroid;
    auto mean = kmeans_centroid(std::span(pts).first(50));
    CHECK(centroid.lon == doctest::Approx(mean.lon).epsilon(1e-12));
  }
  SUBCASE("one blob under automatic parameters") {
    std::mt19937_64 rng(6);
    auto records = make(oracle::blob(kOrigin, 0.15, 50, rng));
    auto pc = cluster_period(records, period);
    REQUIRE(pc.clusters.size() == 1);
    CHECK(pc.clusters[0].size() + pc.noise == 50);
  }
}
