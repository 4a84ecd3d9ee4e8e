#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "riseer/config.hpp"
#include "riseer/synthgen.hpp"

namespace fixture {

/// Three blobs over 1980-2015, the third born in 1988 and merging into the
/// first in 2010. A few thousand records.
inline riseer::ScenarioConfig small_city(std::uint64_t seed = 7, double scale = 1.0) {
  using riseer::BlobSpec;
  riseer::ScenarioConfig c;
  c.seed = seed;
  c.noise_rate = 0.02;
  BlobSpec a;
  a.center = {114.05, 22.54};
  a.sigma_km = 0.8;
  a.birth_rate.knots = {{0, 1 * scale}, {120, 3 * scale}, {300, 6 * scale}, {431, 5 * scale}};
  a.seasonal_amplitude = 0.2;
  a.death_hazard = 0.003;
  BlobSpec b;
  b.center = {113.92, 22.55};
  b.sigma_km = 0.7;
  b.birth_rate.knots = {{0, 1 * scale}, {431, 3 * scale}};
  b.death_hazard = 0.004;
  b.drift_km_per_year = {0.1, 0.0};
  BlobSpec m;
  m.center = {114.2, 22.66};
  m.sigma_km = 0.6;
  m.birth_rate.knots = {{0, 0}, {96, 0}, {97, 2 * scale}, {431, 3 * scale}};
  m.death_hazard = 0.005;
  m.merge = riseer::MergeSpec{0, 360};
  c.blobs = {a, b, m};
  return c;
}

/// Small-model settings so a full pipeline run takes a few seconds.
inline riseer::PipelineConfig fast_config() {
  riseer::PipelineConfig c;
  c.forecast.rf.trees = 10;
  c.forecast.gbt.trees = 20;
  c.projection.iterations = 250;
  return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("riseer-test-" + name + "-" +
                                                       std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_dataset(const std::filesystem::path& path,
                          std::span<const riseer::EnterpriseRecord> records) {
  std::ofstream out(path, std::ios::binary);
  riseer::write_csv(out, records);
}

}  // namespace fixture
