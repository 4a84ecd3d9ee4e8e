#include <nlohmann/json.hpp>

#include "doctest.h"
#include "riseer/error.hpp"
#include "riseer/synthgen.hpp"
#include "scenario_fixture.hpp"

using namespace riseer;

TEST_CASE("rate curve") {
  RateCurve c{{{0, 0}, {10, 0}, {20, 10}}};
  CHECK(c.at(-5) == 0);
  CHECK(c.at(15) == 5);
  CHECK(c.at(40) == 10);
  CHECK(c.first_positive() == 11);
  CHECK_FALSE(RateCurve{{{0, 0}}}.first_positive());
}

TEST_CASE("generate is deterministic and labelled") {
  auto cfg = fixture::small_city(3);
  auto a = generate(cfg);
  auto b = generate(cfg);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.records.size() > 1000);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].id == b.records[i].id);
    CHECK(a.records[i].lon == b.records[i].lon);
    CHECK(a.records[i].start_date == b.records[i].start_date);
  }
  CHECK(a.truth.blob_of_record.size() == a.records.size());
  CHECK(a.truth.merges.size() == 1);
  CHECK(a.truth.merges[0].month == Month::of(2010, 1));
  const auto& regimes = a.truth.regime_changes;
  CHECK(std::find(regimes.begin(), regimes.end(), Month::of(1990, 1)) != regimes.end());
  for (const auto& r : a.records) {
    CHECK(r.start_month() >= cfg.span.first);
    CHECK(r.start_month() <= cfg.span.last);
    if (r.end_date) CHECK(*r.end_date >= r.start_date);
  }
  // The late blob has no births before its first positive rate.
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    if (a.truth.blob_of_record[i] == 2) CHECK(a.records[i].start_month() >= Month::of(1988, 2));
  }
  auto other = generate(fixture::small_city(4));
  CHECK(other.records.size() != a.records.size());
}

TEST_CASE("scenario json round trip") {
  auto cfg = fixture::small_city(5);
  auto j = scenario_to_json(cfg);
  auto back = scenario_from_json(j);
  CHECK(scenario_to_json(back) == j);
  auto scenario = generate(cfg);
  auto truth = ground_truth_to_json(scenario.truth, scenario.records);
  CHECK(truth["schema"] == "riseer.groundtruth.v1");
  j["blobs"][0]["sigma_km"] = -1;
  CHECK_THROWS_AS(scenario_from_json(j), Error);
}

TEST_CASE("regime series") {
  auto rs = regime_series({.seed = 1, .months = 100, .start_level = 10, .breakpoints = {40},
                           .slopes = {1.0, -2.0}, .noise_fraction = 0.0});
  REQUIRE(rs.values.size() == 100);
  CHECK(rs.values[40] == doctest::Approx(50.0));
  CHECK(rs.values[41] == doctest::Approx(48.0));
  CHECK(rs.values == rs.schedule);
  auto noisy = regime_series({.seed = 1, .months = 100, .start_level = 10, .breakpoints = {40},
                              .slopes = {1.0, -2.0}, .noise_fraction = 0.02});
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(std::abs(noisy.values[i] - noisy.schedule[i]) <= noisy.noise_bound);
  }
  CHECK(noisy.noise_bound == doctest::Approx(0.02 * 118));
}
