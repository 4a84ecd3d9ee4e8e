#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace riseer {

/// Dense row-major feature matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  void append_row(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Binary regression tree node. Internal nodes send x[feature] < threshold to
/// the left child. cover is the training weight that reached the node.
struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  double cover = 0.0;

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  /// Cover-weighted mean of the leaves.
  double expected_value() const;
  std::size_t depth() const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  void scale_leaves(double factor);

 private:
  std::vector<TreeNode> nodes_;
};

/// Additive tree model: prediction = bias + sum of tree outputs.
struct TreeEnsemble {
  double bias = 0.0;
  std::vector<RegressionTree> trees;

  double predict(std::span<const double> x) const;
  double expected_value() const;
};

struct TreeParams {
  std::size_t max_depth = 4;
  double min_leaf_weight = 1.0;
  std::size_t max_features = 0;  // 0: all features at every node
};

/// Greedy variance-reduction CART fit. weights hold per-row multiplicities
/// (zero excludes a row); rng drives per-node feature sampling only.
RegressionTree fit_tree(const Matrix& x, std::span<const double> y,
                        std::span<const double> weights, const TreeParams& params,
                        std::uint64_t seed);

struct ForestParams {
  std::size_t trees = 100;
  TreeParams tree{8, 1.0, 0};  // max_features 0 -> cols / 3
  std::uint64_t seed = 7;
};

/// Bagged CART regression trees; leaves are pre-scaled by 1 / trees.
TreeEnsemble fit_random_forest(const Matrix& x, std::span<const double> y,
                               const ForestParams& params);

struct BoostingParams {
  std::size_t trees = 200;
  double learning_rate = 0.1;
  double subsample = 0.8;
  TreeParams tree{3, 1.0, 0};
  std::uint64_t seed = 7;
};

/// Stagewise least-squares gradient boosting with shrinkage; bias is the
/// target mean and leaves are pre-scaled by the learning rate.
TreeEnsemble fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                   const BoostingParams& params);

}  // namespace riseer
