#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "salecast/matrix.hpp"
#include "salecast/rng.hpp"

namespace salecast {

// CART node, flattened. Internal nodes route x[feature] <= threshold left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  std::size_t count0 = 0, count1 = 0;
  double probability = 0.0;  // positives / total at the leaf
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_proba(std::span<const double> x) const;
};

struct ForestParams {
  std::size_t n_trees = 200;
  std::size_t max_depth = 0;  // 0 = unbounded
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // 0 = ceil(sqrt(d))
  bool bootstrap = true;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
};

double gini(std::size_t count0, std::size_t count1);

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // impurity decrease, sample-weighted
};

// Best greedy Gini split at the root of the given sample over the given
// candidate features. Exposed for the brute-force equivalence tests.
SplitChoice best_split(const Matrix& X, const std::vector<int>& y,
                       const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& features);

Tree fit_tree(const Matrix& X, const std::vector<int>& y,
              const ForestParams& params, Rng& rng);

// Per-tree RNG is seeded by (seed, tree index), so parallel and serial
// fits produce identical forests. n_threads 0 uses the OpenMP default.
ForestModel fit_forest(const Matrix& X, const std::vector<int>& y,
                       const ForestParams& params, std::uint64_t seed,
                       int n_threads = 0);

// Plain-loop reference, kept for the parallel-equivalence tests.
ForestModel fit_forest_serial(const Matrix& X, const std::vector<int>& y,
                              const ForestParams& params, std::uint64_t seed);

// Mean of leaf probabilities across trees.
double predict_proba_forest(const ForestModel& model, std::span<const double> x);

// Hard-vote fraction of trees predicting class 1.
double vote_fraction_forest(const ForestModel& model, std::span<const double> x);

// Total weighted impurity decrease per feature, normalized to sum 1.
std::vector<double> impurity_importance(const ForestModel& model);

}  // namespace salecast
