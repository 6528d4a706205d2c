#include "salecast/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef SALECAST_OPENMP
#include <omp.h>
#endif

namespace salecast {

namespace {
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
  return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}
}  // namespace

double sigmoid_logit(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::pair<double, double> logloss_grad_hess(double p, int y) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("probability must lie in (0,1)");
  return {p - y, p * (1.0 - p)};
}

double leaf_weight(double G, double H, double lambda) {
  const double denom = H + lambda;
  if (denom <= 0.0) throw std::invalid_argument("H + lambda must be positive");
  return -G / denom;
}

double split_gain(double GL, double HL, double GR, double HR, double lambda,
                  double gamma) {
  return 0.5 * (GL * GL / (HL + lambda) + GR * GR / (HR + lambda) -
                (GL + GR) * (GL + GR) / (HL + HR + lambda)) -
         gamma;
}

double BoostedTree::value(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0)
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left
                                                  : nodes[i].right;
  return nodes[i].weight;
}

namespace {

struct FeatureBest {
  bool found = false;
  double gain = 0.0;
  double threshold = 0.0;
};

struct NodeWork {
  int node_id;
  std::size_t depth;
  // per-feature row lists sorted by that feature's value; partitioning at a
  // split keeps them sorted
  std::vector<std::vector<std::uint32_t>> sorted;
  double G = 0.0, H = 0.0;
};

struct Booster {
  const Matrix& X;
  const BoostParams& p;
  int n_threads;
  std::vector<double> grad, hess;

  FeatureBest scan_feature(const std::vector<std::uint32_t>& rows,
                           std::size_t f, double G, double H) const {
    FeatureBest best;
    double GL = 0.0, HL = 0.0;
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      GL += grad[rows[i]];
      HL += hess[rows[i]];
      if (X.at(rows[i], f) == X.at(rows[i + 1], f)) continue;
      const double GR = G - GL, HR = H - HL;
      if (HL < p.min_child_hessian || HR < p.min_child_hessian) continue;
      const double g = split_gain(GL, HL, GR, HR, p.lambda, p.gamma);
      if (g > 0.0 && g > (best.found ? best.gain : 0.0)) {
        best.found = true;
        best.gain = g;
        best.threshold = 0.5 * (X.at(rows[i], f) + X.at(rows[i + 1], f));
      }
    }
    return best;
  }

  BoostedTree grow() {
    BoostedTree tree;
    std::vector<NodeWork> stack;

    NodeWork root;
    root.node_id = 0;
    root.depth = 0;
    tree.nodes.emplace_back();
    root.sorted.resize(X.cols);
    for (std::size_t f = 0; f < X.cols; ++f) {
      auto& v = root.sorted[f];
      v.resize(X.rows);
      std::iota(v.begin(), v.end(), std::uint32_t{0});
      std::stable_sort(v.begin(), v.end(),
                       [&](std::uint32_t a, std::uint32_t b) {
                         return X.at(a, f) < X.at(b, f);
                       });
    }
    for (std::size_t r = 0; r < X.rows; ++r) {
      root.G += grad[r];
      root.H += hess[r];
    }
    stack.push_back(std::move(root));

    while (!stack.empty()) {
      NodeWork w = std::move(stack.back());
      stack.pop_back();
      BoostNode& node = tree.nodes[w.node_id];

      bool split_ok = w.depth < p.max_depth && w.sorted[0].size() >= 2;
      int best_f = -1;
      FeatureBest best;
      if (split_ok) {
        std::vector<FeatureBest> per_feature(X.cols);
        const std::int64_t d = static_cast<std::int64_t>(X.cols);
#ifdef SALECAST_OPENMP
#pragma omp parallel for schedule(static) if (n_threads != 1) \
    num_threads(n_threads > 0 ? n_threads : omp_get_max_threads())
#endif
        for (std::int64_t f = 0; f < d; ++f)
          per_feature[f] = scan_feature(w.sorted[f], f, w.G, w.H);
        // deterministic reduction: lowest feature index wins ties
        for (std::int64_t f = 0; f < d; ++f) {
          if (per_feature[f].found &&
              (best_f < 0 || per_feature[f].gain > best.gain)) {
            best = per_feature[f];
            best_f = static_cast<int>(f);
          }
        }
        split_ok = best_f >= 0;
      }

      if (!split_ok) {
        node.weight = leaf_weight(w.G, w.H, p.lambda);
        ++tree.leaf_count;
        continue;
      }

      node.feature = best_f;
      node.threshold = best.threshold;
      node.gain = best.gain;
      node.left = static_cast<int>(tree.nodes.size());
      node.right = node.left + 1;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();

      NodeWork left, right;
      left.node_id = node.left;
      right.node_id = node.right;
      left.depth = right.depth = w.depth + 1;
      left.sorted.resize(X.cols);
      right.sorted.resize(X.cols);
      for (std::size_t f = 0; f < X.cols; ++f) {
        for (std::uint32_t r : w.sorted[f])
          (X.at(r, best_f) <= best.threshold ? left.sorted[f]
                                             : right.sorted[f])
              .push_back(r);
      }
      for (std::uint32_t r : left.sorted[0]) {
        left.G += grad[r];
        left.H += hess[r];
      }
      right.G = w.G - left.G;
      right.H = w.H - left.H;
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));
    }
    return tree;
  }
};

}  // namespace

BoostedModel fit_boosted(const Matrix& X, const std::vector<int>& y,
                         const BoostParams& params, std::uint64_t /*seed*/,
                         int n_threads) {
  if (X.rows == 0) throw std::invalid_argument("empty feature matrix");
  if (y.size() != X.rows) throw std::invalid_argument("label length mismatch");
  if (params.n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
  if (!(params.base_score > 0.0 && params.base_score < 1.0))
    throw std::invalid_argument("base_score must lie in (0,1)");

  BoostedModel model;
  model.params = params;
  model.n_features = X.cols;

  const double base_logit =
      std::log(params.base_score / (1.0 - params.base_score));
  std::vector<double> logit(X.rows, base_logit);

  Booster booster{X, params, n_threads, {}, {}};
  booster.grad.resize(X.rows);
  booster.hess.resize(X.rows);

  for (std::size_t round = 0; round < params.n_rounds; ++round) {
    for (std::size_t r = 0; r < X.rows; ++r) {
      const double p = clamp_prob(sigmoid_logit(logit[r]));
      auto [g, h] = logloss_grad_hess(p, y[r]);
      booster.grad[r] = g;
      booster.hess[r] = h;
    }
    BoostedTree tree = booster.grow();
    // a round whose root accepts no split cannot improve; later rounds see
    // unchanged statistics, so stop
    if (tree.nodes[0].feature < 0) break;
    for (std::size_t r = 0; r < X.rows; ++r)
      logit[r] += params.eta * tree.value(X.row(r));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double predict_logit_boosted(const BoostedModel& model,
                             std::span<const double> x) {
  if (x.size() != model.n_features)
    throw std::invalid_argument("feature dimension mismatch");
  double z = std::log(model.params.base_score / (1.0 - model.params.base_score));
  for (const auto& t : model.trees) z += model.params.eta * t.value(x);
  return z;
}

double predict_proba_boosted(const BoostedModel& model,
                             std::span<const double> x) {
  return sigmoid_logit(predict_logit_boosted(model, x));
}

std::vector<double> gain_importance(const BoostedModel& model) {
  std::vector<double> imp(model.n_features, 0.0);
  for (const auto& tree : model.trees)
    for (const auto& node : tree.nodes)
      if (node.feature >= 0) imp[node.feature] += node.gain;
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0)
    for (auto& v : imp) v /= total;
  return imp;
}

}  // namespace salecast
