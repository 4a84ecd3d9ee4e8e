#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. Deliberately naive: full matrices, explicit enumeration.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "riseer/geo.hpp"
#include "riseer/trees.hpp"

namespace oracle {

double haversine(const riseer::LonLat& a, const riseer::LonLat& b);

/// Full-matrix DBSCAN: core points by explicit neighbourhood counts,
/// clusters as connected components of the core graph ordered by their
/// smallest core index, border points given to the earliest such cluster.
std::vector<int> dbscan(std::span<const riseer::LonLat> points, double eps_km,
                        std::size_t min_pts);

/// Adjusted Rand index from the contingency table.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Same partition up to a relabelling (noise must map to noise).
bool same_partition(std::span<const int> a, std::span<const int> b);

/// Mean distance to the k-th nearest neighbour, k = 1..k_max, via sorting
/// each full distance row.
std::vector<double> knn_curve(std::span<const riseer::LonLat> points, std::size_t k_max);

/// Exact Shapley values of the path-dependent conditional expectation by
/// enumeration of all 2^M feature subsets. Features never used by the model
/// are skipped from the enumeration (their value is exactly 0).
std::vector<double> exhaustive_shapley(const riseer::TreeEnsemble& model,
                                       std::span<const double> x);

/// Coordinates `km` east/north of an origin, using the local latitude cosine.
riseer::LonLat offset_km(const riseer::LonLat& origin, double east_km, double north_km);

/// Gaussian blob of n points around centre with sigma in km.
std::vector<riseer::LonLat> blob(const riseer::LonLat& centre, double sigma_km, std::size_t n,
                                 std::mt19937_64& rng);

/// Least-squares line over (i, y_i) by the normal equations in long double.
struct Line {
  double slope, intercept, max_residual;
};
Line least_squares(std::span<const double> y, std::size_t lo, std::size_t hi);

}  // namespace oracle
