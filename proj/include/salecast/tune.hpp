#pragma once

#include <cstdint>
#include <vector>

#include "salecast/pipeline.hpp"

namespace salecast {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignments;  // row -> fold id
  std::uint64_t seed = 0;
  bool exact_stratification = true;

  std::vector<std::size_t> fold_rows(int fold) const;
  std::vector<std::size_t> complement_rows(int fold) const;
};

// Within each class, rows are shuffled by seed and dealt round-robin.
FoldPlan stratified_kfold(const std::vector<int>& y, int k, std::uint64_t seed);

struct CvScore {
  std::vector<double> fold_scores;
  double mean = 0.0;
};

// Fits the pipeline (including encodings) on each fold complement and scores
// accuracy on the fold.
CvScore cross_val_score(const PipelineSpec& spec, const Frame& frame,
                        const FoldPlan& plan, std::uint64_t seed,
                        int n_threads = 0);

struct GridResult {
  std::vector<ModelSpec> candidates;
  std::vector<CvScore> scores;
  std::size_t best = 0;  // maximizes mean score; first in grid order on ties
};

GridResult grid_search(const PipelineSpec& base,
                       const std::vector<ModelSpec>& grid, const Frame& frame,
                       int inner_k, std::uint64_t seed, int n_threads = 0);

// Backward elimination driven by the fitted model's importance ranking;
// returns the visited subset with maximum inner-CV accuracy, smaller subset
// winning ties.
std::vector<std::string> select_features_by_importance(const PipelineSpec& spec,
                                                       const Frame& frame,
                                                       int inner_k,
                                                       std::uint64_t seed,
                                                       int n_threads = 0);

struct NestedCvFold {
  double score = 0.0;
  ModelSpec chosen_params;
  std::vector<std::string> chosen_features;
};

struct NestedCvResult {
  std::vector<NestedCvFold> folds;
  double mean_score = 0.0;
};

// Per outer fold: inner grid search then feature selection on the training
// part only, fit with the choices, score on the held-out fold.
NestedCvResult nested_cv(const PipelineSpec& base,
                         const std::vector<ModelSpec>& grid, const Frame& frame,
                         int outer_k, int inner_k, std::uint64_t seed,
                         bool select_features = true, int n_threads = 0);

// Same, over a caller-supplied outer fold plan (used by the leakage probes).
NestedCvResult nested_cv(const PipelineSpec& base,
                         const std::vector<ModelSpec>& grid, const Frame& frame,
                         const FoldPlan& outer, int inner_k, std::uint64_t seed,
                         bool select_features = true, int n_threads = 0);

// Default search grids for the tunable families.
std::vector<ModelSpec> default_grid(const ModelSpec& base, std::size_t n_features);

// Stratified holdout split: returns (train_rows, test_rows).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    const std::vector<int>& y, double test_fraction, std::uint64_t seed);

}  // namespace salecast
