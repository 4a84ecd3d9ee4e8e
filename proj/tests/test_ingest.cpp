#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "riseer/error.hpp"
#include "riseer/ingest.hpp"

using namespace riseer;

namespace {

std::string header() { return std::string(kCsvHeader) + "\n"; }

}  // namespace

TEST_CASE("calendar months") {
  auto m = Month::of(1990, 3);
  CHECK(m.year() == 1990);
  CHECK(m.month() == 3);
  CHECK((m + 10).to_string() == "1991-01");
  CHECK(Month::parse("1991-01") == Month::of(1991, 1));
  CHECK_FALSE(Month::parse("1991-13"));
  CHECK_FALSE(parse_date("1991-02-29"));
  CHECK(parse_date("1992-02-29"));
  CHECK(format_date(Month::of(1992, 2).last_day()) == "1992-02-29");
  CHECK(Month::of(-1, 12).year() == -1);
}

TEST_CASE("parse_csv: empty input") {
  std::istringstream in("");
  auto r = parse_csv(in);
  CHECK(r.records.empty());
  CHECK(r.rejections.empty());
}

TEST_CASE("parse_csv: inverted lifespan rejected") {
  std::istringstream in(header() +
                        "E1,,114.0,22.5,1995-01-01,1990-01-01,Tertiary,F51,10,A,private,closed\n");
  auto r = parse_csv(in);
  CHECK(r.records.empty());
  REQUIRE(r.rejections.size() == 1);
  CHECK(r.rejections[0].reason == "lifespan inverted");
  CHECK(r.rejections[0].row == 1);
}

TEST_CASE("parse_csv: out-of-range latitude") {
  std::istringstream in(header() +
                        "E1,a,114.0,22.5,1990-01-01,,Tertiary,F51,10,A,private,surviving\n"
                        "E2,b,114.0,95,1990-01-01,,Primary,A01,10,A,private,surviving\n"
                        "E3,\"c, ltd\",114.1,22.6,1991-05-20,1999-01-01,2,C13,10,B,private,closed\n"
                        "E4,d,114.2,22.7,1992-01-01,,3,F51,0,C,foreign,surviving\n");
  auto r = parse_csv(in);
  REQUIRE(r.records.size() == 3);
  REQUIRE(r.rejections.size() == 1);
  CHECK(r.rejections[0].row == 2);
  CHECK(r.rejections[0].reason == "lat out of range");
  CHECK(r.records[1].name == std::optional<std::string>("c, ltd"));
  CHECK(r.records[1].tier == Tier::Secondary);
}

TEST_CASE("parse_csv: other per-row violations") {
  std::istringstream in(header() +
                        "E1,,114.0,22.5,1990-02-30,,Tertiary,F51,10,A,private,surviving\n"
                        "E2,,114.0,22.5,1990-01-01,,Tertiary,F51,-5,A,private,surviving\n"
                        "E3,,200,22.5,1990-01-01,,Tertiary,F51,5,A,private,surviving\n"
                        "E4,,114,22.5,1990-01-01,,Quaternary,F51,5,A,private,surviving\n"
                        "E5,,114,22.5,1990-01-01,,Tertiary,F51,5,A,private,surviving\n"
                        "E5,,114,22.5,1990-01-01,,Tertiary,F51,5,A,private,surviving\n");
  auto r = parse_csv(in);
  CHECK(r.records.size() == 1);
  REQUIRE(r.rejections.size() == 5);
  CHECK(r.rejections[0].reason == "bad start_date");
  CHECK(r.rejections[1].reason == "negative capital");
  CHECK(r.rejections[2].reason == "lon out of range");
  CHECK(r.rejections[3].reason == "bad tier");
  CHECK(r.rejections[4].reason == "duplicate id");
}

TEST_CASE("parse_csv: missing column is fatal") {
  std::istringstream in("id,lon,lat\nE1,1,2\n");
  CHECK_THROWS_AS(parse_csv(in), Error);
}

TEST_CASE("csv round trip") {
  std::vector<EnterpriseRecord> records{
      fixture::record("E1", 114.0, 22.5, "1990-01-01"),
      fixture::record("E2", 114.1, 22.6, "1991-01-01", "1999-12-31", Tier::Primary, 2.5)};
  records[0].name = "quote \" and, comma";
  std::ostringstream out;
  write_csv(out, records);
  std::istringstream in(out.str());
  auto r = parse_csv(in);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].name == records[0].name);
  CHECK(r.records[1].end_date == records[1].end_date);
  CHECK(r.records[1].registered_capital == 2.5);
}

TEST_CASE("parse_jsonl") {
  std::istringstream in(
      R"({"id":"E1","lon":114.0,"lat":22.5,"start_date":"1990-01-01","tier":"Tertiary","classification_code":"F51","registered_capital":10,"credit_rating":"A","property":"private","state":"surviving"})"
      "\nnot json\n");
  auto r = parse_jsonl(in);
  CHECK(r.records.size() == 1);
  REQUIRE(r.rejections.size() == 1);
  CHECK(r.rejections[0].reason == "malformed JSON");
}

TEST_CASE("activity rule") {
  auto open = fixture::record("a", 0, 0, "1990-03-15");
  auto closed = fixture::record("b", 0, 0, "1990-01-10", "1990-02-01");
  std::vector<EnterpriseRecord> records{open, closed};
  auto index = reindex_by_month(records, {Month::of(1990, 1), Month::of(1990, 4)});
  REQUIRE(index.months() == 4);
  auto at = [&](int m) {
    auto s = index.active(Month::of(1990, m));
    return std::vector<std::uint32_t>(s.begin(), s.end());
  };
  CHECK(at(1) == std::vector<std::uint32_t>{1});
  CHECK(at(2) == std::vector<std::uint32_t>{1});
  CHECK(at(3) == std::vector<std::uint32_t>{0});
  CHECK(at(4) == std::vector<std::uint32_t>{0});
  CHECK(index.active(Month::of(1990, 5)).empty());
}

TEST_CASE("reindex matches brute-force scan") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> month(0, 119), len(0, 60), coin(0, 1);
  std::vector<EnterpriseRecord> records;
  for (int i = 0; i < 1000; ++i) {
    Month s = Month::of(1990, 1) + month(rng);
    auto r = fixture::record("E" + std::to_string(i), 0, 0, "1990-01-01");
    r.start_date = s.first_day();
    if (coin(rng)) r.end_date = (s + len(rng)).last_day();
    records.push_back(r);
  }
  auto index = reindex_by_month(records);
  REQUIRE(!index.empty());
  for (Month m = index.span().first; m <= index.span().last; ++m) {
    std::vector<std::uint32_t> expected;
    for (std::uint32_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      const bool started = r.start_date <= m.last_day();
      const bool alive = !r.end_date || *r.end_date >= m.first_day();
      if (started && alive) expected.push_back(i);
    }
    auto got = index.active(m);
    CHECK(std::vector<std::uint32_t>(got.begin(), got.end()) == expected);
  }
}

TEST_CASE("empty input gives empty index") {
  std::vector<EnterpriseRecord> none;
  CHECK(reindex_by_month(none).empty());
  CHECK_FALSE(data_span(none));
}

TEST_CASE("vocabulary and one-hot") {
  Vocabulary v({"C", "A", "B"});
  CHECK(v.values() == std::vector<std::string>{"A", "B", "C"});
  CHECK(v.one_hot("B") == std::vector<double>{0, 1, 0, 0});
  CHECK(v.one_hot("Z") == std::vector<double>{0, 0, 0, 1});
  std::vector<EnterpriseRecord> records{fixture::record("a", 0, 0, "1990-01-01"),
                                        fixture::record("b", 0, 0, "1990-01-01")};
  records[1].classification_code = "A01";
  auto vocab = Vocabularies::build(records);
  CHECK(vocab.classification.size() == 2);
  CHECK(vocab.classification.encoded_size() == 3);
}

TEST_CASE("credit scale") {
  CreditScale scale;
  CHECK(scale.code("A") == 1.0);
  CHECK(scale.code("M") == 5.0);
  CHECK_FALSE(scale.code("Q"));
}

TEST_CASE("monthly series") {
  SUBCASE("one tertiary record over the whole span") {
    std::vector<EnterpriseRecord> records{fixture::record("a", 0, 0, "1990-01-01")};
    auto index = reindex_by_month(records, {Month::of(1990, 1), Month::of(1990, 12)});
    auto series = build_monthly_series(index, records);
    REQUIRE(series.snapshots.size() == 12);
    for (const auto& s : series.snapshots) {
      CHECK(s.active_counts == std::array<std::int64_t, 3>{0, 0, 1});
    }
    CHECK(series.snapshots[4].model_features[0] == 1990);
    CHECK(series.snapshots[4].model_features[1] == 5);
  }
  SUBCASE("no records") {
    std::vector<EnterpriseRecord> none;
    auto index = reindex_by_month(none, {Month::of(1990, 1), Month::of(1990, 3)});
    auto series = build_monthly_series(index, none);
    REQUIRE(series.snapshots.size() == 3);
    for (const auto& s : series.snapshots) CHECK(s.total() == 0);
    CHECK_FALSE(series.warnings.empty());
  }
  SUBCASE("100 records against a brute-force scan") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> month(0, 35), len(0, 20), tier(0, 2);
    std::vector<EnterpriseRecord> records;
    for (int i = 0; i < 100; ++i) {
      auto r = fixture::record("E" + std::to_string(i), 0, 0, "1990-01-01");
      Month s = Month::of(1990, 1) + month(rng);
      r.start_date = s.first_day();
      if (i % 3 == 0) r.end_date = (s + len(rng)).first_day();
      r.tier = static_cast<Tier>(tier(rng));
      records.push_back(r);
    }
    auto index = reindex_by_month(records);
    auto series = build_monthly_series(index, records);
    for (const auto& snap : series.snapshots) {
      std::array<std::int64_t, 3> expected{};
      for (const auto& r : records) {
        if (r.active_in(snap.month)) ++expected[static_cast<std::size_t>(r.tier)];
      }
      CHECK(snap.active_counts == expected);
    }
  }
}
