#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "riseer/calendar.hpp"
#include "riseer/forecast.hpp"
#include "riseer/ingest.hpp"

namespace riseer {

/// Read-only view over a published store directory. All queries are const
/// and safe to call from concurrent readers.
class ArtifactStore {
 public:
  /// Loads manifest, artifacts and records. Throws Error{not_found} when dir
  /// holds no manifest, Error{io_error}/Error{parse_error} on damage.
  static std::shared_ptr<const ArtifactStore> open(const std::filesystem::path& dir);

  const std::filesystem::path& directory() const { return dir_; }
  const nlohmann::json& manifest() const { return manifest_; }
  /// Throws Error{not_found} for an unknown kind.
  const nlohmann::json& artifact(std::string_view kind) const;
  std::span<const EnterpriseRecord> records() const { return records_; }

  /// Snapshots and forecast points with from <= month <= to, in stored order.
  /// Throws Error{invalid_argument} when from > to.
  nlohmann::json query_range(Month from, Month to) const;

  /// Clusters artifact restricted to one period (all periods when nullopt).
  nlohmann::json clusters(std::optional<std::size_t> period) const;
  /// Forecast artifact restricted to a tier and/or model.
  nlohmann::json forecast(std::optional<Tier> tier, std::optional<ModelKind> model) const;

  /// Registration series, livability curve, category histograms and heat
  /// grid of one cluster. Throws Error{not_found} for an unknown id.
  nlohmann::json cluster_details(std::string_view id, std::size_t grid = 100) const;

  /// Indicators of 2-3 clusters normalised over the selection only.
  /// Throws Error{invalid_argument} for fewer than 2 or more than 3 ids and
  /// Error{not_found} for an unknown id.
  nlohmann::json compare_clusters(std::span<const std::string> ids) const;

 private:
  struct ClusterRef {
    const nlohmann::json* period = nullptr;
    const nlohmann::json* cluster = nullptr;
    const nlohmann::json* metrics = nullptr;
    std::vector<std::uint32_t> members;
  };

  ArtifactStore() = default;
  const ClusterRef& find_cluster(std::string_view id) const;

  std::filesystem::path dir_;
  nlohmann::json manifest_;
  std::unordered_map<std::string, nlohmann::json> artifacts_;
  std::vector<EnterpriseRecord> records_;
  std::unordered_map<std::string, ClusterRef> clusters_;
};

}  // namespace riseer
