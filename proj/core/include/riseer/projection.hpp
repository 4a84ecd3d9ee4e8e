#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riseer/ingest.hpp"

namespace riseer {

/// Projection featurisation of one month's active population: histograms
/// (proportions) of classification code, property, state and credit rating,
/// each including the "other" slot, followed by log10(1 + mean capital) and
/// log10(1 + total capital). Zero actives give an all-zero vector.
std::vector<double> snapshot_vector(std::span<const EnterpriseRecord> records,
                                    std::span<const std::uint32_t> active,
                                    const Vocabularies& vocab);

/// Fills projection_features of every snapshot from the index.
void attach_projection_features(std::span<MonthlySnapshot> snapshots, const MonthIndex& index,
                                std::span<const EnterpriseRecord> records,
                                const Vocabularies& vocab);

struct TsneOptions {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double learning_rate = 0.0;  // <= 0: n / 12
  std::uint64_t seed = 7;
};

struct TsneResult {
  std::vector<std::array<double, 2>> embedding;
  std::vector<double> kl_trace;  // KL(P || Q) after each iteration (unexaggerated)
  double kl = 0.0;
  double max_entropy_error = 0.0;  // |H(P_i) - log(perplexity)| worst row
  double learning_rate = 0.0;
};

/// Row-conditional Gaussian affinities calibrated by bisection on the
/// precision so that each row's entropy equals log(perplexity).
struct Affinities {
  std::vector<double> conditional;  // n x n, rows sum to 1, zero diagonal
  std::vector<double> joint;        // symmetrised, sums to 1
  double max_entropy_error = 0.0;
};

Affinities compute_affinities(std::span<const std::vector<double>> vectors, double perplexity);

/// Exact O(n^2) t-SNE. Throws Error{invalid_argument} for fewer than 3
/// vectors or perplexity >= n / 3.
TsneResult tsne_embed(std::span<const std::vector<double>> vectors, const TsneOptions& options);

/// Column-wise z-scores; constant columns become zero.
std::vector<std::vector<double>> zscore_columns(std::span<const std::vector<double>> vectors);

struct ProjectionPoint {
  Month month;
  std::array<double, 2> xy{};
  std::size_t order_index = 0;
};

struct Chronology {
  std::vector<std::size_t> order;  // positions into the input, ascending month
  std::size_t first = 0;           // position of the earliest month
  std::size_t last = 0;            // position of the latest month
  std::size_t segments() const { return order.empty() ? 0 : order.size() - 1; }
};

Chronology chronology(std::span<const ProjectionPoint> points);

struct Projection {
  std::vector<ProjectionPoint> points;
  TsneResult tsne;
  TsneOptions settings;
};

/// z-scores the snapshots' projection vectors and embeds them. The
/// perplexity is lowered to (n - 1) / 3 when the series is too short.
Projection project_snapshots(std::span<const MonthlySnapshot> snapshots, TsneOptions options);

}  // namespace riseer
