#pragma once

#include <cstdint>
#include <vector>

#include "salecast/matrix.hpp"

namespace salecast {

struct BoostParams {
  std::size_t n_rounds = 300;
  double eta = 0.1;
  double lambda = 1.0;  // L2 penalty on leaf weights
  double gamma = 0.0;   // per-leaf penalty
  std::size_t max_depth = 6;
  double min_child_hessian = 1.0;
  double base_score = 0.5;
};

// Regression-tree node over (gradient, hessian) statistics; leaves carry a
// log-odds contribution.
struct BoostNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1, right = -1;
  double weight = 0.0;  // leaf only
  double gain = 0.0;    // accepted split gain, for importance
};

struct BoostedTree {
  std::vector<BoostNode> nodes;
  std::size_t leaf_count = 0;

  double value(std::span<const double> x) const;
};

struct BoostedModel {
  std::vector<BoostedTree> trees;
  BoostParams params;
  std::size_t n_features = 0;
};

// Gradient and hessian of the log loss as a function of the logit.
std::pair<double, double> logloss_grad_hess(double p, int y);

// w* = -G/(H+lambda), minimizer of G*w + (H+lambda)*w^2/2.
double leaf_weight(double G, double H, double lambda);

double split_gain(double GL, double HL, double GR, double HR, double lambda,
                  double gamma);

double sigmoid_logit(double z);

// Exact greedy second-order boosting. Splits with non-positive gain are not
// accepted; a round that accepts no split contributes a single-leaf tree.
// n_threads controls the per-feature split scans; output is independent of
// it.
BoostedModel fit_boosted(const Matrix& X, const std::vector<int>& y,
                         const BoostParams& params, std::uint64_t seed,
                         int n_threads = 0);

double predict_proba_boosted(const BoostedModel& model, std::span<const double> x);

// Raw logit, base included.
double predict_logit_boosted(const BoostedModel& model, std::span<const double> x);

// Total accepted split gain per feature, normalized to sum 1.
std::vector<double> gain_importance(const BoostedModel& model);

}  // namespace salecast
