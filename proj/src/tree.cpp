#include "salecast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef SALECAST_OPENMP
#include <omp.h>
#endif

namespace salecast {

double gini(std::size_t count0, std::size_t count1) {
  const std::size_t n = count0 + count1;
  if (n == 0) throw std::invalid_argument("gini of empty node");
  const double p0 = static_cast<double>(count0) / static_cast<double>(n);
  const double p1 = static_cast<double>(count1) / static_cast<double>(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

double Tree::predict_proba(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0)
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left
                                                  : nodes[i].right;
  return nodes[i].probability;
}

SplitChoice best_split(const Matrix& X, const std::vector<int>& y,
                       const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& features) {
  const std::size_t n = rows.size();
  std::size_t total1 = 0;
  for (std::size_t r : rows) total1 += y[r];
  const std::size_t total0 = n - total1;
  const double parent = gini(total0, total1);

  SplitChoice best;
  std::vector<std::pair<double, int>> vals(n);
  for (std::size_t f : features) {
    for (std::size_t i = 0; i < n; ++i)
      vals[i] = {X.at(rows[i], f), y[rows[i]]};
    std::sort(vals.begin(), vals.end());

    std::size_t left1 = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left1 += vals[i].second;
      if (vals[i].first == vals[i + 1].first) continue;
      const std::size_t nl = i + 1, nr = n - nl;
      const std::size_t left0 = nl - left1;
      const std::size_t right1 = total1 - left1;
      const std::size_t right0 = nr - right1;
      const double child =
          (static_cast<double>(nl) * gini(left0, left1) +
           static_cast<double>(nr) * gini(right0, right1)) /
          static_cast<double>(n);
      const double gain = parent - child;
      // ties broken by lowest feature index then lowest threshold: features
      // arrive sorted and thresholds ascend, so strict > keeps the first
      if (gain > best.gain && gain > 0.0) {
        best.found = true;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        best.gain = gain;
      }
    }
  }
  return best;
}

namespace {

// sample k distinct feature indices, returned sorted
std::vector<std::size_t> sample_features(std::size_t d, std::size_t k, Rng& rng) {
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (k >= d) return all;
  // partial Fisher-Yates
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_int(d - i);
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

struct TreeBuilder {
  const Matrix& X;
  const std::vector<int>& y;
  const ForestParams& params;
  std::size_t max_features;
  Rng& rng;
  Tree tree;

  int build(std::vector<std::size_t>& rows, std::size_t depth) {
    std::size_t c1 = 0;
    for (std::size_t r : rows) c1 += y[r];
    const std::size_t c0 = rows.size() - c1;

    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].count0 = c0;
    tree.nodes[id].count1 = c1;
    tree.nodes[id].probability =
        static_cast<double>(c1) / static_cast<double>(rows.size());

    const bool depth_ok = params.max_depth == 0 || depth < params.max_depth;
    if (c0 == 0 || c1 == 0 || rows.size() < params.min_samples_split ||
        !depth_ok)
      return id;

    const auto feats = sample_features(X.cols, max_features, rng);
    const SplitChoice s = best_split(X, y, rows, feats);
    if (!s.found) return id;

    std::vector<std::size_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (std::size_t r : rows)
      (X.at(r, s.feature) <= s.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[id].feature = s.feature;
    tree.nodes[id].threshold = s.threshold;
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

Tree fit_one_tree(const Matrix& X, const std::vector<int>& y,
                  const ForestParams& params, std::uint64_t tree_seed) {
  Rng rng(tree_seed);
  std::vector<std::size_t> rows(X.rows);
  if (params.bootstrap) {
    for (auto& r : rows) r = rng.uniform_int(X.rows);
  } else {
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  const std::size_t mf =
      params.max_features
          ? std::min(params.max_features, X.cols)
          : static_cast<std::size_t>(
                std::ceil(std::sqrt(static_cast<double>(X.cols))));
  TreeBuilder b{X, y, params, mf, rng, {}};
  b.build(rows, 0);
  return std::move(b.tree);
}

}  // namespace

Tree fit_tree(const Matrix& X, const std::vector<int>& y,
              const ForestParams& params, Rng& rng) {
  if (X.rows == 0) throw std::invalid_argument("empty feature matrix");
  if (y.size() != X.rows) throw std::invalid_argument("label length mismatch");
  std::vector<std::size_t> rows(X.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const std::size_t mf =
      params.max_features
          ? std::min(params.max_features, X.cols)
          : static_cast<std::size_t>(
                std::ceil(std::sqrt(static_cast<double>(X.cols))));
  TreeBuilder b{X, y, params, mf, rng, {}};
  b.build(rows, 0);
  return std::move(b.tree);
}

ForestModel fit_forest(const Matrix& X, const std::vector<int>& y,
                       const ForestParams& params, std::uint64_t seed,
                       int n_threads) {
  if (X.rows == 0) throw std::invalid_argument("empty feature matrix");
  if (params.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  ForestModel m;
  m.params = params;
  m.seed = seed;
  m.n_features = X.cols;
  m.trees.resize(params.n_trees);
  const std::int64_t nt = static_cast<std::int64_t>(params.n_trees);
#ifdef SALECAST_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(n_threads > 0 ? n_threads : omp_get_max_threads())
#endif
  for (std::int64_t t = 0; t < nt; ++t)
    m.trees[t] = fit_one_tree(X, y, params, derive_seed(seed, t));
  (void)n_threads;
  return m;
}

ForestModel fit_forest_serial(const Matrix& X, const std::vector<int>& y,
                              const ForestParams& params, std::uint64_t seed) {
  if (X.rows == 0) throw std::invalid_argument("empty feature matrix");
  ForestModel m;
  m.params = params;
  m.seed = seed;
  m.n_features = X.cols;
  m.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t)
    m.trees.push_back(fit_one_tree(X, y, params, derive_seed(seed, t)));
  return m;
}

double predict_proba_forest(const ForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_features)
    throw std::invalid_argument("feature dimension mismatch");
  double sum = 0.0;
  for (const auto& t : model.trees) sum += t.predict_proba(x);
  return sum / static_cast<double>(model.trees.size());
}

double vote_fraction_forest(const ForestModel& model, std::span<const double> x) {
  if (x.size() != model.n_features)
    throw std::invalid_argument("feature dimension mismatch");
  std::size_t votes = 0;
  for (const auto& t : model.trees) votes += t.predict_proba(x) >= 0.5;
  return static_cast<double>(votes) / static_cast<double>(model.trees.size());
}

std::vector<double> impurity_importance(const ForestModel& model) {
  std::vector<double> imp(model.n_features, 0.0);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (node.feature < 0) continue;
      const auto& l = tree.nodes[node.left];
      const auto& r = tree.nodes[node.right];
      const double n = static_cast<double>(node.count0 + node.count1);
      const double nl = static_cast<double>(l.count0 + l.count1);
      const double nr = static_cast<double>(r.count0 + r.count1);
      const double decrease = gini(node.count0, node.count1) -
                              (nl * gini(l.count0, l.count1) +
                               nr * gini(r.count0, r.count1)) /
                                  n;
      imp[node.feature] += n * decrease;
    }
  }
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0)
    for (auto& v : imp) v /= total;
  return imp;
}

}  // namespace salecast
