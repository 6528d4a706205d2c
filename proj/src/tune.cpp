#include "salecast/tune.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "salecast/metrics.hpp"
#include "salecast/rng.hpp"

namespace salecast {

std::vector<std::size_t> FoldPlan::fold_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignments.size(); ++r)
    if (assignments[r] == fold) out.push_back(r);
  return out;
}

std::vector<std::size_t> FoldPlan::complement_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < assignments.size(); ++r)
    if (assignments[r] != fold) out.push_back(r);
  return out;
}

FoldPlan stratified_kfold(const std::vector<int>& y, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (static_cast<std::size_t>(k) > y.size())
    throw std::invalid_argument("k exceeds row count");

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(y.size(), 0);
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < y.size(); ++r)
      if (y[r] == cls) rows.push_back(r);
    if (rows.size() < static_cast<std::size_t>(k))
      plan.exact_stratification = false;
    Rng rng(derive_seed(seed, 100 + cls));
    rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i)
      plan.assignments[rows[i]] = static_cast<int>(i % k);
  }
  return plan;
}

namespace {

double accuracy_of(const FittedPipeline& fp, const Frame& validation) {
  const auto pred = fp.predict_class(validation);
  const auto truth = target_vector(validation);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

void check_two_classes(const std::vector<int>& y) {
  const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
  const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
  if (!has0 || !has1)
    throw std::invalid_argument("training fold contains a single class");
}

}  // namespace

CvScore cross_val_score(const PipelineSpec& spec, const Frame& frame,
                        const FoldPlan& plan, std::uint64_t seed,
                        int n_threads) {
  if (plan.assignments.size() != frame.n_rows())
    throw std::invalid_argument("fold plan does not match frame");
  CvScore out;
  for (int fold = 0; fold < plan.k; ++fold) {
    const Frame train = frame.select_rows(plan.complement_rows(fold));
    check_two_classes(target_vector(train));
    const FittedPipeline fp =
        fit_pipeline(spec, train, derive_seed(seed, 500 + fold), n_threads);
    const Frame validation = frame.select_rows(plan.fold_rows(fold));
    out.fold_scores.push_back(accuracy_of(fp, validation));
  }
  out.mean = std::accumulate(out.fold_scores.begin(), out.fold_scores.end(),
                             0.0) /
             static_cast<double>(out.fold_scores.size());
  return out;
}

GridResult grid_search(const PipelineSpec& base,
                       const std::vector<ModelSpec>& grid, const Frame& frame,
                       int inner_k, std::uint64_t seed, int n_threads) {
  if (grid.empty()) throw std::invalid_argument("empty grid");
  const FoldPlan plan =
      stratified_kfold(target_vector(frame), inner_k, derive_seed(seed, 7));
  GridResult result;
  result.candidates = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PipelineSpec spec = base;
    spec.model = grid[i];
    result.scores.push_back(
        cross_val_score(spec, frame, plan, derive_seed(seed, 11 + i), n_threads));
    if (result.scores[i].mean > result.scores[result.best].mean) result.best = i;
  }
  return result;
}

std::vector<std::string> select_features_by_importance(const PipelineSpec& spec,
                                                       const Frame& frame,
                                                       int inner_k,
                                                       std::uint64_t seed,
                                                       int n_threads) {
  if (spec.features.size() < 2)
    throw std::invalid_argument("feature selection needs >= 2 features");
  const FoldPlan plan =
      stratified_kfold(target_vector(frame), inner_k, derive_seed(seed, 13));

  std::vector<std::string> current = spec.features;
  std::vector<std::string> best_subset = current;
  double best_score = -1.0;
  while (!current.empty()) {
    PipelineSpec step = spec;
    step.features = current;
    const CvScore cv =
        cross_val_score(step, frame, plan, derive_seed(seed, 17), n_threads);
    // >= prefers the later (smaller) subset on ties
    if (cv.mean >= best_score) {
      best_score = cv.mean;
      best_subset = current;
    }
    if (current.size() == 1) break;

    const FittedPipeline full =
        fit_pipeline(step, frame, derive_seed(seed, 19), n_threads);
    const auto imp = full.model->importance();
    // post-encoding order matches input order, so index i maps back directly
    std::size_t drop = 0;
    for (std::size_t i = 1; i < imp.size(); ++i)
      if (imp[i] < imp[drop]) drop = i;
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return best_subset;
}

NestedCvResult nested_cv(const PipelineSpec& base,
                         const std::vector<ModelSpec>& grid, const Frame& frame,
                         int outer_k, int inner_k, std::uint64_t seed,
                         bool select_features, int n_threads) {
  const FoldPlan outer =
      stratified_kfold(target_vector(frame), outer_k, derive_seed(seed, 23));
  return nested_cv(base, grid, frame, outer, inner_k, seed, select_features,
                   n_threads);
}

NestedCvResult nested_cv(const PipelineSpec& base,
                         const std::vector<ModelSpec>& grid, const Frame& frame,
                         const FoldPlan& outer, int inner_k, std::uint64_t seed,
                         bool select_features, int n_threads) {
  const int outer_k = outer.k;
  NestedCvResult result;
  for (int fold = 0; fold < outer_k; ++fold) {
    const Frame train = frame.select_rows(outer.complement_rows(fold));
    const std::uint64_t fold_seed = derive_seed(seed, 29 + fold);

    NestedCvFold f;
    const GridResult gr =
        grid_search(base, grid, train, inner_k, fold_seed, n_threads);
    f.chosen_params = gr.candidates[gr.best];

    PipelineSpec chosen = base;
    chosen.model = f.chosen_params;
    if (select_features && base.features.size() >= 2) {
      f.chosen_features = select_features_by_importance(
          chosen, train, inner_k, fold_seed, n_threads);
    } else {
      f.chosen_features = base.features;
    }
    chosen.features = f.chosen_features;

    const FittedPipeline fp =
        fit_pipeline(chosen, train, derive_seed(fold_seed, 31), n_threads);
    f.score = accuracy_of(fp, frame.select_rows(outer.fold_rows(fold)));
    result.folds.push_back(std::move(f));
  }
  for (const auto& f : result.folds) result.mean_score += f.score;
  result.mean_score /= static_cast<double>(result.folds.size());
  return result;
}

std::vector<ModelSpec> default_grid(const ModelSpec& base,
                                    std::size_t n_features) {
  std::vector<ModelSpec> grid;
  switch (base.family) {
    case ModelFamily::Boosted:
      for (std::size_t depth : {3, 6, 9})
        for (double lambda : {0.1, 1.0, 10.0}) {
          ModelSpec s = base;
          s.boost.max_depth = depth;
          s.boost.lambda = lambda;
          grid.push_back(s);
        }
      break;
    case ModelFamily::Forest:
      for (std::size_t n_trees : {100, 300})
        for (int mf_kind : {0, 1}) {
          ModelSpec s = base;
          s.forest.n_trees = n_trees;
          s.forest.max_features =
              mf_kind == 0
                  ? static_cast<std::size_t>(
                        std::ceil(std::sqrt(static_cast<double>(n_features))))
                  : std::max<std::size_t>(1, n_features / 3);
          grid.push_back(s);
        }
      break;
    default:
      grid.push_back(base);
  }
  return grid;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    const std::vector<int>& y, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must lie in (0,1)");
  std::vector<std::size_t> train, test;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < y.size(); ++r)
      if (y[r] == cls) rows.push_back(r);
    Rng rng(derive_seed(seed, 200 + cls));
    rng.shuffle(rows);
    const std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    for (std::size_t i = 0; i < rows.size(); ++i)
      (i < n_test ? test : train).push_back(rows[i]);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

}  // namespace salecast
