#include "riseer/tree_shap.hpp"

#include <cstddef>

#include "riseer/error.hpp"

namespace riseer {
namespace {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

using Path = std::vector<PathElement>;

void extend(Path& path, std::size_t depth, double zero_fraction, double one_fraction,
            int feature) {
  path.resize(depth + 1);
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  const double d1 = static_cast<double>(depth + 1);
  for (std::size_t i = depth; i-- > 0;) {
    path[i + 1].weight += one_fraction * path[i].weight * static_cast<double>(i + 1) / d1;
    path[i].weight = zero_fraction * path[i].weight * static_cast<double>(depth - i) / d1;
  }
}

void unwind(Path& path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next_one = path[depth].weight;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight = next_one * d1 / (static_cast<double>(i + 1) * one);
      next_one = tmp - path[i].weight * zero * static_cast<double>(depth - i) / d1;
    } else {
      path[i].weight = path[i].weight * d1 / (zero * static_cast<double>(depth - i));
    }
  }
  for (std::size_t i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
  path.resize(depth);
}

// Total permutation weight of the path with element `index` removed.
double unwound_sum(const Path& path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next_one = path[depth].weight;
  double total = 0.0;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = next_one * d1 / (static_cast<double>(i + 1) * one);
      total += tmp;
      next_one = path[i].weight - tmp * zero * static_cast<double>(depth - i) / d1;
    } else if (zero != 0.0) {
      total += path[i].weight / zero / (static_cast<double>(depth - i) / d1);
    }
  }
  return total;
}

void recurse(const std::vector<TreeNode>& nodes, std::size_t node, std::span<const double> x,
             std::span<double> phi, Path path, std::size_t depth, double zero_fraction,
             double one_fraction, int feature) {
  extend(path, depth, zero_fraction, one_fraction, feature);
  const TreeNode& n = nodes[node];
  if (n.is_leaf()) {
    for (std::size_t i = 1; i <= depth; ++i) {
      const double w = unwound_sum(path, depth, i);
      const auto& el = path[i];
      phi[static_cast<std::size_t>(el.feature)] +=
          w * (el.one_fraction - el.zero_fraction) * n.value;
    }
    return;
  }

  const auto split = static_cast<std::size_t>(n.feature);
  const bool go_left = x[split] < n.threshold;
  const auto hot = static_cast<std::size_t>(go_left ? n.left : n.right);
  const auto cold = static_cast<std::size_t>(go_left ? n.right : n.left);
  const double hot_zero = n.cover > 0.0 ? nodes[hot].cover / n.cover : 0.0;
  const double cold_zero = n.cover > 0.0 ? nodes[cold].cover / n.cover : 0.0;
  double incoming_zero = 1.0, incoming_one = 1.0;

  // A feature already on the path is undone before being re-extended.
  std::size_t index = 1;
  while (index <= depth && path[index].feature != n.feature) ++index;
  if (index <= depth) {
    incoming_zero = path[index].zero_fraction;
    incoming_one = path[index].one_fraction;
    unwind(path, depth, index);
    --depth;
  }
  recurse(nodes, hot, x, phi, path, depth + 1, hot_zero * incoming_zero, incoming_one,
          n.feature);
  recurse(nodes, cold, x, phi, path, depth + 1, cold_zero * incoming_zero, 0.0, n.feature);
}

}  // namespace

void tree_shap(const RegressionTree& tree, std::span<const double> x, std::span<double> phi) {
  const auto& nodes = tree.nodes();
  if (nodes.empty() || nodes[0].is_leaf()) return;
  recurse(nodes, 0, x, phi, Path{}, 0, 1.0, 1.0, -1);
}

ShapValues tree_shap(const TreeEnsemble& model, std::span<const double> x) {
  ShapValues out;
  out.phi.assign(x.size(), 0.0);
  out.base_value = model.expected_value();
  for (const auto& tree : model.trees) {
    for (const auto& n : tree.nodes()) {
      if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= x.size()) {
        throw Error(Errc::invalid_argument, "input narrower than the model's features");
      }
    }
    tree_shap(tree, x, out.phi);
  }
  return out;
}

}  // namespace riseer
