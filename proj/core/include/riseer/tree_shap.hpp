#pragma once

#include <span>
#include <vector>

#include "riseer/trees.hpp"

namespace riseer {

struct ShapValues {
  double base_value = 0.0;
  std::vector<double> phi;  // one per input feature
};

/// Exact path-dependent Tree SHAP: Shapley values of the conditional
/// expectation that averages over the subtrees of absent features weighted by
/// training cover. Polynomial time per tree (leaves x depth^2).
/// base_value + sum(phi) equals the ensemble prediction up to rounding.
ShapValues tree_shap(const TreeEnsemble& model, std::span<const double> x);

/// Adds one tree's attributions into phi.
void tree_shap(const RegressionTree& tree, std::span<const double> x, std::span<double> phi);

}  // namespace riseer
