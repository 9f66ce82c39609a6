#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "windclime/learn.hpp"
#include "windclime/rng.hpp"

namespace windclime::learn::detail {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }
};

/// Core predictor over standardized features; one score per class, summing
/// to 1. Implementations are immutable after construction.
class ClassifierImpl {
 public:
  virtual ~ClassifierImpl() = default;
  virtual std::vector<double> class_scores(std::span<const double> x) const = 0;
  virtual nlohmann::json params_json() const = 0;
};

using ImplPtr = std::shared_ptr<const ClassifierImpl>;

// One trainer + deserializer pair per model kind. X holds standardized rows,
// y class indices in [0, n_classes).
ImplPtr train_knn(const Matrix& x, const std::vector<int>& y, int n_classes,
                  const Hyperparams& hp);
ImplPtr train_naive_bayes(const Matrix& x, const std::vector<int>& y, int n_classes,
                          const Hyperparams& hp);
ImplPtr train_svm(const Matrix& x, const std::vector<int>& y, int n_classes,
                  const Hyperparams& hp);
ImplPtr train_logistic(const Matrix& x, const std::vector<int>& y, int n_classes,
                       const Hyperparams& hp);
ImplPtr train_random_forest(const Matrix& x, const std::vector<int>& y, int n_classes,
                            const Hyperparams& hp, Rng& rng);
ImplPtr train_gbdt(const Matrix& x, const std::vector<int>& y, int n_classes,
                   const Hyperparams& hp);

ImplPtr knn_from_json(const nlohmann::json& j);
ImplPtr naive_bayes_from_json(const nlohmann::json& j);
ImplPtr svm_from_json(const nlohmann::json& j);
ImplPtr logistic_from_json(const nlohmann::json& j);
ImplPtr random_forest_from_json(const nlohmann::json& j);
ImplPtr gbdt_from_json(const nlohmann::json& j);

// Shared decision-tree machinery (random forest and boosting).
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution, or {gamma} for regression
};

struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

/// Grows a classification tree (Gini) to purity. `max_features` > 0 samples
/// that many candidate features per split from `rng`.
Tree grow_classification_tree(const Matrix& x, const std::vector<int>& y,
                              std::span<const std::size_t> sample_indices,
                              int n_classes, int max_features, Rng* rng);

struct GrownRegressionTree {
  Tree tree;
  std::vector<int> leaf_ids;                         // node indices of leaves
  std::vector<std::vector<std::size_t>> leaf_samples;  // parallel to leaf_ids
};

/// Depth-limited least-squares regression tree over all features. Leaf
/// payloads start as the mean target; callers may overwrite them using the
/// reported leaf sample sets.
GrownRegressionTree grow_regression_tree(const Matrix& x, std::span<const double> target,
                                         std::span<const std::size_t> sample_indices,
                                         int max_depth);

double sigmoid(double z);

}  // namespace windclime::learn::detail
