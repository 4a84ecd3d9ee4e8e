#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "riseer/error.hpp"
#include "riseer/hash.hpp"
#include "riseer/pipeline.hpp"
#include "riseer/schema.hpp"
#include "riseer/store.hpp"
#include "scenario_fixture.hpp"

using namespace riseer;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config json") {
  auto c = fixture::fast_config();
  auto back = PipelineConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(config_hash(back) == config_hash(c));

  auto j = nlohmann::json::parse(R"({"segmentation":{"threshold":"abs:40","series":"tier:Primary"},
    "clustering":{"eps_km":0.5,"min_pts":6},"metrics":{"rings_km":[0,1,3,9],"ai_basis":"capital"},
    "forecast":{"models":["gbt"],"tiers":["Tertiary"],"refit":"monthly","gbt":{"trees":7}}})");
  auto p = PipelineConfig::from_json(j);
  CHECK(p.segmentation.threshold.kind == Threshold::Kind::Absolute);
  CHECK(p.segmentation.series.tier == Tier::Primary);
  CHECK(p.clustering.manual == ClusterParams{0.5, 6});
  CHECK(p.rings.size() == 3);
  CHECK(p.ai_basis == AiBasis::Capital);
  CHECK(p.forecast.models == std::vector<ModelKind>{ModelKind::GradientBoostedTrees});
  CHECK(p.forecast.gbt.trees == 7);
  CHECK(p.forecast.for_model(ModelKind::GradientBoostedTrees).trees == 7);

  CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"segmentaton":{}})")), Error);
  CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"clustering":{"eps_km":1}})")), Error);
  CHECK_THROWS_AS(PipelineConfig::from_json(nlohmann::json::parse(R"({"forecast":{"models":["arima"]}})")), Error);
}

TEST_CASE("schema validator") {
  auto schema = nlohmann::json::parse(R"({
    "definitions": {"month": {"type": "string", "pattern": "^[0-9]{4}-[0-9]{2}$"}},
    "type": "object", "required": ["m", "n"], "additionalProperties": false,
    "properties": {"m": {"$ref": "#/definitions/month"},
                   "n": {"type": "integer", "minimum": 0},
                   "k": {"enum": ["a", "b"]},
                   "v": {"anyOf": [{"type": "null"}, {"type": "array", "items": {"type": "number"}, "maxItems": 2}]}}})");
  CHECK(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01","n":3,"v":[1,2]})")).empty());
  CHECK(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01","n":3,"v":null})")).empty());
  CHECK_FALSE(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-1","n":3})")).empty());
  CHECK_FALSE(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01","n":-1})")).empty());
  CHECK_FALSE(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01","n":1.5})")).empty());
  CHECK_FALSE(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01"})")).empty());
  CHECK_FALSE(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01","n":1,"x":0})")).empty());
  CHECK_FALSE(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01","n":1,"k":"c"})")).empty());
  CHECK_FALSE(validate_schema(schema, nlohmann::json::parse(R"({"m":"1990-01","n":1,"v":[1,2,3]})")).empty());
  for (auto kind : kArtifactKinds) CHECK_NOTHROW(published_schema(schema_id(kind)));
  CHECK_THROWS_AS(published_schema("riseer.nope.v1"), Error);
}

TEST_CASE("empty dataset fails at ingest") {
  auto dir = fixture::temp_dir("empty");
  std::ofstream(dir / "empty.csv") << kCsvHeader << "\n";
  try {
    run_pipeline(dir / "empty.csv", fixture::fast_config(), dir / "store");
    FAIL("expected degenerate_dataset");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
    CHECK(e.code() == Errc::degenerate_dataset);
  }
  CHECK_FALSE(fs::exists(dir / "store"));
  fs::remove_all(dir);
}

TEST_CASE("pipeline run, rerun and store queries") {
  auto dir = fixture::temp_dir("pipeline");
  auto scenario = generate(fixture::small_city(7));
  fixture::write_dataset(dir / "city.csv", scenario.records);
  const auto cfg = fixture::fast_config();
  const auto store_dir = dir / "store";

  auto first = run_pipeline(dir / "city.csv", cfg, store_dir);
  CHECK_FALSE(first.reused);
  for (auto kind : kArtifactKinds) {
    const auto file = store_dir / (std::string(kind) + ".json");
    REQUIRE(fs::exists(file));
    auto doc = nlohmann::json::parse(slurp(file));
    CHECK(validate_schema(published_schema(schema_id(kind)), doc).empty());
    CHECK(first.manifest["artifacts"][std::string(kind)]["sha256"] == sha256_file(file));
  }
  CHECK(validate_schema(published_schema("riseer.manifest.v1"), first.manifest).empty());
  const std::string manifest_bytes = slurp(store_dir / "manifest.json");

  SUBCASE("rerun is a no-op") {
    auto again = run_pipeline(dir / "city.csv", cfg, store_dir);
    CHECK(again.reused);
    CHECK(slurp(store_dir / "manifest.json") == manifest_bytes);
  }
  SUBCASE("forced rerun reproduces every artifact") {
    auto again = run_pipeline(dir / "city.csv", cfg, store_dir, {.force = true});
    CHECK_FALSE(again.reused);
    CHECK(again.manifest["artifacts"] == first.manifest["artifacts"]);
    CHECK(again.manifest["files"] == first.manifest["files"]);
  }
  SUBCASE("a changed config rebuilds") {
    auto other = cfg;
    other.segmentation.threshold.value = 0.08;
    auto again = run_pipeline(dir / "city.csv", other, store_dir);
    CHECK_FALSE(again.reused);
    CHECK(again.manifest["config_sha256"] != first.manifest["config_sha256"]);
  }
  SUBCASE("a failing run leaves the previous store intact") {
    auto bad = cfg;
    bad.forecast.initial_years = 60;  // span ends before the first evaluation
    CHECK_THROWS_AS(run_pipeline(dir / "city.csv", bad, store_dir), StageError);
    CHECK(slurp(store_dir / "manifest.json") == manifest_bytes);
    for (const auto& entry : fs::directory_iterator(dir)) {
      CHECK(entry.path().filename().string().find(".tmp-") == std::string::npos);
    }
  }
  SUBCASE("store queries") {
    auto store = ArtifactStore::open(store_dir);
    CHECK(store->records().size() == scenario.records.size());
    auto range = store->query_range(Month::of(1990, 1), Month::of(1990, 12));
    CHECK(validate_schema(published_schema("riseer.range.v1"), range).empty());
    CHECK(range["snapshots"].size() == 12);
    CHECK_THROWS_AS(store->query_range(Month::of(1991, 1), Month::of(1990, 1)), Error);

    const auto& clusters = store->artifact("clusters");
    REQUIRE(!clusters["periods"].empty());
    std::vector<std::string> ids;
    for (const auto& p : clusters["periods"]) {
      for (const auto& c : p["clusters"]) ids.push_back(c["id"]);
    }
    REQUIRE(ids.size() >= 2);
    auto details = store->cluster_details(ids[0], 20);
    CHECK(validate_schema(published_schema("riseer.cluster_details.v1"), details).empty());
    std::int64_t cells = 0;
    for (const auto& row : details["heat_grid"]["counts"]) {
      for (const auto& v : row) cells += v.get<std::int64_t>();
    }
    CHECK(cells == details["size"].get<std::int64_t>());
    CHECK_THROWS_AS(store->cluster_details("P9-C9"), Error);

    std::vector<std::string> pair{ids[0], ids[1]};
    auto cmp = store->compare_clusters(pair);
    CHECK(validate_schema(published_schema("riseer.compare.v1"), cmp).empty());
    const auto a = cmp["clusters"][0]["indicators"]["n_tertiary"].get<double>();
    const auto b = cmp["clusters"][1]["indicators"]["n_tertiary"].get<double>();
    CHECK(cmp["bounds"]["n_tertiary"]["min"].get<double>() == std::min(a, b));
    CHECK(cmp["bounds"]["n_tertiary"]["max"].get<double>() == std::max(a, b));
    std::vector<std::string> same{ids[0], ids[0]};
    auto twin = store->compare_clusters(same);
    CHECK(twin["clusters"][0]["normalized"] == twin["clusters"][1]["normalized"]);
    std::vector<std::string> four{ids[0], ids[1], ids[0], ids[1]};
    CHECK_THROWS_AS(store->compare_clusters(four), Error);
    std::vector<std::string> unknown{ids[0], "nope"};
    CHECK_THROWS_AS(store->compare_clusters(unknown), Error);
  }
  fs::remove_all(dir);
}
