#include "riseer/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "riseer/error.hpp"

namespace riseer {
namespace {

struct NodeStats {
  double w = 0.0;
  double wy = 0.0;
};

struct Candidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Row orders per feature, computed once per fit.
std::vector<std::vector<std::uint32_t>> presort(const Matrix& x) {
  std::vector<std::vector<std::uint32_t>> order(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& o = order[f];
    o.resize(x.rows());
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
  }
  return order;
}

RegressionTree fit_presorted(const Matrix& x, std::span<const double> y,
                             std::span<const double> weights,
                             const std::vector<std::vector<std::uint32_t>>& order,
                             const TreeParams& params, std::mt19937_64& rng) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<TreeNode> nodes(1);
  std::vector<NodeStats> stats(1);
  std::vector<int> node_of(n, -1);
  for (std::size_t r = 0; r < n; ++r) {
    if (weights[r] > 0.0) {
      node_of[r] = 0;
      stats[0].w += weights[r];
      stats[0].wy += weights[r] * y[r];
    }
  }
  if (stats[0].w <= 0.0) throw Error(Errc::invalid_argument, "tree fit with no weight");

  std::vector<int> frontier{0};
  const std::size_t mtry = params.max_features == 0 ? p : std::min(params.max_features, p);
  std::vector<std::size_t> features(p);
  std::iota(features.begin(), features.end(), 0);

  for (std::size_t depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    // Slot of each frontier node; -1 for nodes no longer split.
    std::vector<int> slot(nodes.size(), -1);
    for (std::size_t k = 0; k < frontier.size(); ++k) slot[frontier[k]] = static_cast<int>(k);
    const std::size_t m = frontier.size();

    std::vector<char> allowed(m * p, mtry == p ? 1 : 0);
    if (mtry < p) {
      for (std::size_t k = 0; k < m; ++k) {
        std::shuffle(features.begin(), features.end(), rng);
        for (std::size_t j = 0; j < mtry; ++j) allowed[k * p + features[j]] = 1;
      }
    }

    std::vector<Candidate> best(m);
    std::vector<NodeStats> left(m);
    std::vector<double> last_value(m);
    std::vector<char> seen(m);
    for (std::size_t f = 0; f < p; ++f) {
      std::fill(left.begin(), left.end(), NodeStats{});
      std::fill(seen.begin(), seen.end(), 0);
      for (std::uint32_t r : order[f]) {
        const int node = node_of[r];
        if (node < 0) continue;
        const int k = slot[node];
        if (k < 0 || !allowed[static_cast<std::size_t>(k) * p + f]) continue;
        const double v = x(r, f);
        auto& l = left[k];
        const auto& total = stats[node];
        if (seen[k] && v > last_value[k]) {
          const double rw = total.w - l.w;
          if (l.w >= params.min_leaf_weight && rw >= params.min_leaf_weight) {
            const double rwy = total.wy - l.wy;
            const double gain =
                l.wy * l.wy / l.w + rwy * rwy / rw - total.wy * total.wy / total.w;
            if (gain > best[k].gain + 1e-12 * std::abs(total.wy * total.wy / total.w)) {
              best[k] = {gain, static_cast<int>(f), 0.5 * (last_value[k] + v)};
              // Guard against midpoints collapsing onto v.
              if (!(best[k].threshold > last_value[k] && best[k].threshold <= v)) {
                best[k].threshold = v;
              }
            }
          }
        }
        l.w += weights[r];
        l.wy += weights[r] * y[r];
        last_value[k] = v;
        seen[k] = 1;
      }
    }

    std::vector<int> next;
    for (std::size_t k = 0; k < m; ++k) {
      if (best[k].feature < 0) continue;
      const int node = frontier[k];
      nodes[node].feature = best[k].feature;
      nodes[node].threshold = best[k].threshold;
      nodes[node].left = static_cast<int>(nodes.size());
      nodes[node].right = static_cast<int>(nodes.size() + 1);
      nodes.emplace_back();
      nodes.emplace_back();
      stats.emplace_back();
      stats.emplace_back();
      next.push_back(nodes[node].left);
      next.push_back(nodes[node].right);
    }
    for (std::size_t r = 0; r < n; ++r) {
      const int node = node_of[r];
      if (node < 0 || nodes[node].is_leaf()) continue;
      const int child =
          x(r, nodes[node].feature) < nodes[node].threshold ? nodes[node].left : nodes[node].right;
      node_of[r] = child;
      stats[child].w += weights[r];
      stats[child].wy += weights[r] * y[r];
    }
    frontier = std::move(next);
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].cover = stats[i].w;
    nodes[i].value = stats[i].w > 0.0 ? stats[i].wy / stats[i].w : 0.0;
  }
  return RegressionTree(std::move(nodes));
}

void check_shapes(const Matrix& x, std::span<const double> y) {
  if (x.rows() == 0) throw Error(Errc::invalid_argument, "cannot fit on zero rows");
  if (y.size() != x.rows()) throw Error(Errc::invalid_argument, "target size mismatch");
}

}  // namespace

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw Error(Errc::invalid_argument, "row width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double RegressionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left
                                                                                      : n.right);
  }
  return nodes_[i].value;
}

double RegressionTree::expected_value() const {
  if (nodes_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) sum += n.cover * n.value;
  }
  return nodes_[0].cover > 0.0 ? sum / nodes_[0].cover : 0.0;
}

std::size_t RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
    }
  }
  return best;
}

void RegressionTree::scale_leaves(double factor) {
  for (auto& n : nodes_) n.value *= factor;
}

double TreeEnsemble::predict(std::span<const double> x) const {
  double out = bias;
  for (const auto& t : trees) out += t.predict(x);
  return out;
}

double TreeEnsemble::expected_value() const {
  double out = bias;
  for (const auto& t : trees) out += t.expected_value();
  return out;
}

RegressionTree fit_tree(const Matrix& x, std::span<const double> y,
                        std::span<const double> weights, const TreeParams& params,
                        std::uint64_t seed) {
  check_shapes(x, y);
  std::mt19937_64 rng(seed);
  return fit_presorted(x, y, weights, presort(x), params, rng);
}

TreeEnsemble fit_random_forest(const Matrix& x, std::span<const double> y,
                               const ForestParams& params) {
  check_shapes(x, y);
  if (params.trees == 0) throw Error(Errc::invalid_argument, "forest needs trees");
  const auto order = presort(x);
  TreeParams tree = params.tree;
  if (tree.max_features == 0) tree.max_features = std::max<std::size_t>(1, x.cols() / 3);

  TreeEnsemble model;
  std::vector<double> weights(x.rows());
  for (std::size_t t = 0; t < params.trees; ++t) {
    // Per-tree stream keeps trees independent of evaluation order.
    std::seed_seq seq{params.seed, static_cast<std::uint64_t>(t), std::uint64_t{0x5eed}};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, x.rows() - 1);
    std::fill(weights.begin(), weights.end(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) weights[pick(rng)] += 1.0;
    RegressionTree fitted = fit_presorted(x, y, weights, order, tree, rng);
    fitted.scale_leaves(1.0 / static_cast<double>(params.trees));
    model.trees.push_back(std::move(fitted));
  }
  return model;
}

TreeEnsemble fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                   const BoostingParams& params) {
  check_shapes(x, y);
  if (!(params.learning_rate > 0.0) || !(params.subsample > 0.0) || params.subsample > 1.0) {
    throw Error(Errc::invalid_argument, "bad boosting hyperparameters");
  }
  const auto order = presort(x);
  const std::size_t n = x.rows();
  TreeEnsemble model;
  model.bias = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> fitted(n, model.bias), residual(n), weights(n);
  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  const auto take = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(n))));

  for (std::size_t t = 0; t < params.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
    std::fill(weights.begin(), weights.end(), 0.0);
    if (take >= n) {
      std::fill(weights.begin(), weights.end(), 1.0);
    } else {
      std::shuffle(rows.begin(), rows.end(), rng);
      for (std::size_t i = 0; i < take; ++i) weights[rows[i]] = 1.0;
    }
    RegressionTree tree = fit_presorted(x, residual, weights, order, params.tree, rng);
    tree.scale_leaves(params.learning_rate);
    for (std::size_t i = 0; i < n; ++i) fitted[i] += tree.predict(x.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace riseer
