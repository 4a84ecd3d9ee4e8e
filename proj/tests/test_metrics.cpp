#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "riseer/error.hpp"
#include "riseer/metrics.hpp"

using namespace riseer;

namespace {

const LonLat kCentre{114.05, 22.54};

RegionalCluster cluster_of(std::span<const EnterpriseRecord> records) {
  RegionalCluster c;
  c.id = "P0-C0";
  for (std::uint32_t i = 0; i < records.size(); ++i) c.members.push_back(i);
  c.centroid = kCentre;
  return c;
}

double cv_reference(const std::vector<double>& v) {
  double mean = 0, var = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size())) / mean;
}

}  // namespace

TEST_CASE("coefficient of variation") {
  CHECK(coefficient_of_variation(std::vector<double>{5, 5, 5, 5}) == 0.0);
  CHECK(coefficient_of_variation(std::vector<double>{1, 3}) == doctest::Approx(0.5));
  try {
    coefficient_of_variation(std::vector<double>{0, 0});
    FAIL("expected undefined_cv");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::undefined_cv);
  }
  CHECK_THROWS_AS(coefficient_of_variation(std::vector<double>{}), Error);
}

TEST_CASE("aggregation index") {
  auto ai = aggregation_index(std::vector<double>{1, 3});
  CHECK(ai.kind == AggregationIndex::Kind::Finite);
  CHECK(ai.value == doctest::Approx(2.0));
  CHECK(aggregation_index(std::vector<double>{4, 4, 4}).kind == AggregationIndex::Kind::Unbounded);
  CHECK(aggregation_index(std::vector<double>{0, 0}).kind == AggregationIndex::Kind::Undefined);
  CHECK(std::isinf(AggregationIndex::unbounded().as_double()));
  CHECK(std::isnan(AggregationIndex::undefined().as_double()));
  CHECK(aggregation_index(std::vector<double>{5, 3, 0, 2, 7}).value ==
        doctest::Approx(1.4069300106240255).epsilon(1e-12));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 50.0), scale(0.01, 1000.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(5);
    for (auto& v : x) v = u(rng);
    const double c = scale(rng);
    std::vector<double> cx = x;
    for (auto& v : cx) v *= c;
    const double a = aggregation_index(x).value;
    CHECK(std::abs(aggregation_index(cx).value - a) <= 1e-9 * std::max(1.0, a));
    CHECK(a == doctest::Approx(1.0 / cv_reference(x)).epsilon(1e-12));
  }
}

TEST_CASE("livability") {
  std::vector<EnterpriseRecord> records{
      fixture::record("a", 0, 0, "1990-01-01"), fixture::record("b", 0, 0, "1990-01-01"),
      fixture::record("c", 0, 0, "1990-01-01"),
      fixture::record("d", 0, 0, "1990-01-01", "1995-01-01", Tier::Tertiary, 1, "closed")};
  std::vector<std::uint32_t> members{0, 1, 2, 3};
  auto l = livability(records, members, fixture::date("2000-01-01"));
  CHECK(l.livability == 0.75);
  CHECK(l.livability + l.mortality == 1.0);

  std::vector<EnterpriseRecord> closed{
      fixture::record("a", 0, 0, "1990-01-01", "1991-01-01", Tier::Tertiary, 1, "closed"),
      fixture::record("b", 0, 0, "1990-01-01", "1992-01-01", Tier::Tertiary, 1, "closed")};
  std::vector<std::uint32_t> both{0, 1};
  CHECK(livability(closed, both, fixture::date("2000-01-01")).livability == 0.0);
  CHECK_THROWS_AS(livability(closed, std::vector<std::uint32_t>{}, fixture::date("2000-01-01")),
                  Error);
}

TEST_CASE("indicator set") {
  SUBCASE("homogeneous tertiary cluster") {
    std::vector<EnterpriseRecord> records;
    for (int i = 0; i < 10; ++i) {
      auto p = oracle::offset_km(kCentre, 0.05 * i, 0);
      records.push_back(fixture::record("E" + std::to_string(i), p.lon, p.lat, "1990-01-01",
                                        {}, Tier::Tertiary, 100.0));
    }
    auto set = indicator_set(cluster_of(records), records, fixture::date("2000-01-01"));
    CHECK(set.n_primary == 0);
    CHECK(set.n_secondary == 0);
    CHECK(set.n_tertiary == 10);
    CHECK(set.avg_capital == 100.0);
    CHECK(set.total_capital == 1000.0);
    CHECK(set.credit_rating == 1.0);
    CHECK(set.livability + set.mortality == 1.0);
  }
  SUBCASE("even spread aggregates more than a single ring") {
    const std::vector<double> radii{0.5, 1.7, 3.0, 5.0, 8.0};
    std::vector<EnterpriseRecord> spread, packed;
    for (int i = 0; i < 25; ++i) {
      auto p = oracle::offset_km(kCentre, radii[i % 5] + 0.01 * (i / 5), 0);
      spread.push_back(fixture::record("S" + std::to_string(i), p.lon, p.lat, "1990-01-01"));
      auto q = oracle::offset_km(kCentre, 0.02 * i, 0);
      packed.push_back(fixture::record("P" + std::to_string(i), q.lon, q.lat, "1990-01-01"));
    }
    // One extra member keeps the spread AI finite.
    auto extra = oracle::offset_km(kCentre, 0.3, 0.1);
    spread.push_back(fixture::record("S25", extra.lon, extra.lat, "1990-01-01"));
    auto a = indicator_set(cluster_of(spread), spread, fixture::date("2000-01-01"));
    auto b = indicator_set(cluster_of(packed), packed, fixture::date("2000-01-01"));
    CHECK(a.aggregation_index.as_double() > b.aggregation_index.as_double());
    CHECK(b.aggregation_index.value == doctest::Approx(0.5));
  }
  SUBCASE("random fixture against a one-pass reference") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> km(-6, 6), cap(1, 1000);
    std::uniform_int_distribution<int> tier(0, 2), rating(0, 3), end(0, 3);
    const char* ratings[] = {"A", "B", "C", "D"};
    std::vector<EnterpriseRecord> records;
    for (int i = 0; i < 200; ++i) {
      auto p = oracle::offset_km(kCentre, km(rng), km(rng));
      auto r = fixture::record("E" + std::to_string(i), p.lon, p.lat, "1990-01-01", {},
                               static_cast<Tier>(tier(rng)), cap(rng));
      r.credit_rating = ratings[rating(rng)];
      if (end(rng) == 0) {
        r.end_date = fixture::date("1998-06-30");
        r.state = "closed";
      }
      records.push_back(r);
    }
    const Date as_of = fixture::date("2005-01-01");
    auto set = indicator_set(cluster_of(records), records, as_of);
    std::array<std::int64_t, 3> n{};
    double total = 0, credit = 0, alive = 0;
    std::vector<double> bands(5, 0.0);
    const double edges[] = {0, 1.5, 2, 4, 6, 10};
    for (const auto& r : records) {
      ++n[static_cast<std::size_t>(r.tier)];
      total += r.registered_capital;
      credit += std::string("ABCD").find(r.credit_rating[0]) + 1;
      alive += (r.state == "surviving" && !r.end_date);
      const double d = oracle::haversine(kCentre, {r.lon, r.lat});
      for (int b = 0; b < 5; ++b) {
        if (d >= edges[b] && d < edges[b + 1]) bands[static_cast<std::size_t>(b)] += 1;
      }
    }
    CHECK(set.n_primary == n[0]);
    CHECK(set.n_secondary == n[1]);
    CHECK(set.n_tertiary == n[2]);
    CHECK(set.total_capital == doctest::Approx(total).epsilon(1e-12));
    CHECK(set.avg_capital == doctest::Approx(total / 200).epsilon(1e-12));
    CHECK(set.credit_rating == doctest::Approx(credit / 200).epsilon(1e-12));
    CHECK(set.livability == doctest::Approx(alive / 200).epsilon(1e-12));
    CHECK(set.aggregation_index.value == doctest::Approx(1.0 / cv_reference(bands)).epsilon(1e-12));
  }
}

TEST_CASE("ring profile") {
  SUBCASE("all members within 1 km") {
    std::vector<EnterpriseRecord> records;
    for (int i = 0; i < 8; ++i) {
      auto p = oracle::offset_km(kCentre, 0.1 * i, 0.05 * i);
      records.push_back(fixture::record("E" + std::to_string(i), p.lon, p.lat, "1990-01-01"));
    }
    auto rp = ring_profile(cluster_of(records), records, fixture::date("2000-01-01"));
    CHECK(rp.counts() == std::vector<double>{8, 0, 0, 0, 0});
    CHECK(rp.indicators[0].has_value());
    CHECK_FALSE(rp.indicators[1].has_value());
  }
  SUBCASE("boundary goes to the outer band") {
    std::vector<EnterpriseRecord> records{fixture::record("E0", kCentre.lon, kCentre.lat, "1990-01-01")};
    RegionalCluster c = cluster_of(records);
    MetricsOptions opt;
    // Ring edges at the member's exact distance so the half-open rule decides.
    const double d = haversine_km(kCentre, {kCentre.lon, kCentre.lat + 0.0135});
    records[0].lat = kCentre.lat + 0.0135;
    opt.rings = {{0.0, d}, {d, 2 * d}};
    auto rp = ring_profile(c, records, fixture::date("2000-01-01"), opt);
    CHECK(rp.counts() == std::vector<double>{0, 1});
  }
  SUBCASE("random layout against brute-force bucketing") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> km(-9, 9);
    std::vector<EnterpriseRecord> records;
    for (int i = 0; i < 300; ++i) {
      auto p = oracle::offset_km(kCentre, km(rng), km(rng));
      records.push_back(fixture::record("E" + std::to_string(i), p.lon, p.lat, "1990-01-01"));
    }
    auto rp = ring_profile(cluster_of(records), records, fixture::date("2000-01-01"));
    const double edges[] = {0, 1.5, 2, 4, 6, 10};
    std::vector<double> expected(5, 0.0);
    std::size_t beyond = 0;
    for (const auto& r : records) {
      const double d = oracle::haversine(kCentre, {r.lon, r.lat});
      bool placed = false;
      for (int b = 0; b < 5; ++b) {
        if (d >= edges[b] && d < edges[b + 1]) {
          expected[static_cast<std::size_t>(b)] += 1;
          placed = true;
        }
      }
      beyond += !placed;
    }
    CHECK(rp.counts() == expected);
    CHECK(rp.beyond == beyond);
    double sum = static_cast<double>(rp.beyond);
    for (double v : rp.counts()) sum += v;
    CHECK(sum == 300.0);
  }
}

TEST_CASE("normalize_for_ranking") {
  CHECK(normalize_for_ranking(std::vector<double>{10, 20, 30}) == std::vector<double>{0, 0.5, 1});
  CHECK(normalize_for_ranking(std::vector<double>{7}) == std::vector<double>{0.5});
  auto n = normalize_for_ranking(std::vector<double>{1, INFINITY, NAN, 3});
  CHECK(n == std::vector<double>{0, 1, 0, 1});
}

TEST_CASE("five number summary") {
  auto f = five_number_summary(std::vector<double>{1, 2, 3, 4, 5});
  CHECK(f.min == 1);
  CHECK(f.q1 == 2);
  CHECK(f.median == 3);
  CHECK(f.q3 == 4);
  CHECK(f.max == 5);
  auto g = five_number_summary(std::vector<double>{7, 1, 3.5, 9, 2, 4, 11, 6});
  CHECK(g.min == 1);
  CHECK(g.q1 == doctest::Approx(3.125));
  CHECK(g.median == doctest::Approx(5));
  CHECK(g.q3 == doctest::Approx(7.5));
  CHECK(g.max == 11);
}

TEST_CASE("growth rates") {
  // 100 members from the start, 10 more join in month 2.
  std::vector<EnterpriseRecord> records;
  for (int i = 0; i < 110; ++i) {
    records.push_back(fixture::record("E" + std::to_string(i), 0, 0,
                                      i < 100 ? "1990-01-01" : "1990-02-15"));
  }
  RegionalCluster a = cluster_of(records), b = cluster_of(records);
  a.period = 0;
  b.period = 1;
  b.id = "P1-C0";
  std::vector<Period> periods{{0, 0, 1, {Month::of(1990, 1), Month::of(1990, 2)}},
                              {1, 2, 5, {Month::of(1990, 3), Month::of(1990, 6)}}};
  std::vector<const RegionalCluster*> path{&a, &b};
  auto boxes = growth_rates(path, periods, records);
  REQUIRE(boxes.size() == 6);
  const auto& first = boxes[2];  // period 0, tertiary
  CHECK(first.tier == Tier::Tertiary);
  REQUIRE(first.samples.size() == 1);
  CHECK(first.samples[0] == doctest::Approx(0.10));
  CHECK(boxes[0].skipped == 1);
  const auto& second = boxes[5];
  CHECK(second.samples == std::vector<double>{0, 0, 0});
  std::vector<const RegionalCluster*> single{&a};
  CHECK_THROWS_AS(growth_rates(single, periods, records), Error);
}
