#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "salecast/rng.hpp"
#include "salecast/tune.hpp"
#include "test_util.hpp"

using namespace salecast;
using namespace testutil;

namespace {

// two informative features, one pure-noise feature, one categorical
Frame planted_frame(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x1(n), x2(n), noise(n), cat(n), target(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = rng.normal();
    x2[i] = rng.normal();
    noise[i] = rng.normal();
    cat[i] = double(rng.uniform_int(4));
    target[i] = x1[i] + 0.8 * x2[i] + 0.2 * rng.normal() > 0 ? 1 : 0;
  }
  Frame f;
  f.add_column("x1", numeric(std::move(x1)));
  f.add_column("x2", numeric(std::move(x2)));
  f.add_column("noise", numeric(std::move(noise)));
  f.add_column("nbhd", categorical(std::move(cat)));
  f.add_column("price_high_low", categorical(std::move(target)));
  return f;
}

Frame flip_rows(const Frame& f, const std::vector<std::size_t>& rows) {
  Frame out = f;
  Column t = f.column("price_high_low");
  for (std::size_t r : rows) t.values[r] = 1.0 - t.values[r];
  out.drop_column("price_high_low");
  out.add_column("price_high_low", std::move(t));
  return out;
}

PipelineSpec boosted_spec(const Frame& f) {
  PipelineSpec spec;
  spec.model.family = ModelFamily::Boosted;
  spec.model.boost.n_rounds = 10;
  spec.model.boost.max_depth = 3;
  spec.features = f.feature_names();
  return spec;
}

}  // namespace

TEST_CASE("five of each class with k=5 gives exact stratification") {
  const std::vector<int> y{1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  const FoldPlan plan = stratified_kfold(y, 5, 3);
  CHECK(plan.exact_stratification);
  for (int fold = 0; fold < 5; ++fold) {
    const auto rows = plan.fold_rows(fold);
    REQUIRE(rows.size() == 2);
    CHECK(y[rows[0]] + y[rows[1]] == 1);  // one of each class
  }
}

TEST_CASE("folds partition the rows") {
  Rng rng(4);
  std::vector<int> y(97);
  for (auto& v : y) v = rng.uniform() < 0.37 ? 1 : 0;
  const FoldPlan plan = stratified_kfold(y, 7, 5);
  std::set<std::size_t> seen;
  for (int fold = 0; fold < 7; ++fold)
    for (std::size_t r : plan.fold_rows(fold)) {
      CHECK(!seen.count(r));
      seen.insert(r);
    }
  CHECK(seen.size() == 97);
}

TEST_CASE("per-fold positive rates track the global rate") {
  Rng rng(6);
  std::vector<int> y(200);
  double pos = 0;
  for (auto& v : y) {
    v = rng.uniform() < 0.4 ? 1 : 0;
    pos += v;
  }
  const FoldPlan plan = stratified_kfold(y, 5, 7);
  for (int fold = 0; fold < 5; ++fold) {
    const auto rows = plan.fold_rows(fold);
    double fold_pos = 0;
    for (std::size_t r : rows) fold_pos += y[r];
    CHECK(std::fabs(fold_pos / double(rows.size()) - pos / 200.0) <=
          1.0 / double(rows.size()));
  }
}

TEST_CASE("stratified_kfold rejects bad k") {
  CHECK_THROWS_AS(stratified_kfold({0, 1}, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(stratified_kfold({0, 1}, 3, 1), std::invalid_argument);
}

TEST_CASE("cross_val_score k=2 mean is the average of the fold scores") {
  Frame f = planted_frame(80, 8);
  const FoldPlan plan = stratified_kfold(target_vector(f), 2, 9);
  const CvScore cv = cross_val_score(boosted_spec(f), f, plan, 10);
  REQUIRE(cv.fold_scores.size() == 2);
  CHECK(cv.mean ==
        doctest::Approx((cv.fold_scores[0] + cv.fold_scores[1]) / 2)
            .epsilon(1e-15));
}

TEST_CASE("single-class training fold is rejected") {
  Frame f = planted_frame(10, 11);
  // force all-positive targets except one row: some complement will be pure
  Column t = f.column("price_high_low");
  for (std::size_t r = 0; r < 10; ++r) t.values[r] = r == 0 ? 0.0 : 1.0;
  f.drop_column("price_high_low");
  f.add_column("price_high_low", std::move(t));
  const FoldPlan plan = stratified_kfold(target_vector(f), 2, 12);
  CHECK_THROWS_AS(cross_val_score(boosted_spec(f), f, plan, 13),
                  std::invalid_argument);
}

TEST_CASE("flipping a validation fold's targets complements only its score") {
  Frame f = planted_frame(120, 14);
  PipelineSpec spec = boosted_spec(f);
  spec.encode = true;  // exercises the per-fold encoding refits too
  const FoldPlan plan = stratified_kfold(target_vector(f), 4, 15);
  const CvScore base = cross_val_score(spec, f, plan, 16);

  const int probe_fold = 2;
  const Frame flipped = flip_rows(f, plan.fold_rows(probe_fold));
  const CvScore mutated = cross_val_score(spec, flipped, plan, 16);

  // fold 2's fitted model never saw fold 2: predictions are unchanged, so
  // flipping every truth label exactly complements the accuracy
  CHECK(mutated.fold_scores[probe_fold] ==
        doctest::Approx(1.0 - base.fold_scores[probe_fold]).epsilon(1e-12));
}

TEST_CASE("grid search picks the best mean and first wins ties") {
  Frame f = planted_frame(100, 17);
  const PipelineSpec base = boosted_spec(f);
  ModelSpec weak = base.model;
  weak.boost.n_rounds = 1;
  weak.boost.max_depth = 1;
  ModelSpec strong = base.model;

  const GridResult gr = grid_search(base, {strong, weak, strong}, f, 3, 18);
  // duplicate of the winner later in the grid must not displace it
  CHECK(gr.best != 2);
  for (std::size_t i = 0; i < gr.scores.size(); ++i)
    CHECK(gr.scores[gr.best].mean >= gr.scores[i].mean);

  const GridResult single = grid_search(base, {weak}, f, 3, 18);
  CHECK(single.best == 0);
}

TEST_CASE("backward elimination drops a planted noise feature") {
  Frame f = planted_frame(250, 19);
  PipelineSpec spec = boosted_spec(f);
  spec.model.boost.n_rounds = 20;
  const auto subset = select_features_by_importance(spec, f, 3, 20);
  CHECK(std::find(subset.begin(), subset.end(), "x1") != subset.end());
  CHECK(std::find(subset.begin(), subset.end(), "noise") == subset.end());
}

TEST_CASE("nested cv outer score count and leakage probe") {
  Frame f = planted_frame(150, 21);
  const PipelineSpec base = boosted_spec(f);
  ModelSpec weak = base.model;
  weak.boost.max_depth = 1;
  const std::vector<ModelSpec> grid{base.model, weak};
  const FoldPlan outer = stratified_kfold(target_vector(f), 3, 22);

  const NestedCvResult res = nested_cv(base, grid, f, outer, 3, 23, true);
  REQUIRE(res.folds.size() == 3);
  double mean = 0;
  for (const auto& fold : res.folds) mean += fold.score;
  CHECK(res.mean_score == doctest::Approx(mean / 3).epsilon(1e-15));

  // flip outer fold 1's validation targets; its inner decisions and fitted
  // model only see the complement, so the fold score exactly complements
  const int probe_fold = 1;
  const Frame flipped = flip_rows(f, outer.fold_rows(probe_fold));
  const NestedCvResult mutated = nested_cv(base, grid, flipped, outer, 3, 23, true);
  CHECK(spec_to_json(mutated.folds[probe_fold].chosen_params).dump() ==
        spec_to_json(res.folds[probe_fold].chosen_params).dump());
  CHECK(mutated.folds[probe_fold].chosen_features ==
        res.folds[probe_fold].chosen_features);
  CHECK(mutated.folds[probe_fold].score ==
        doctest::Approx(1.0 - res.folds[probe_fold].score).epsilon(1e-12));
}

TEST_CASE("nested cv with a single candidate matches plain cross validation") {
  Frame f = planted_frame(90, 24);
  const PipelineSpec base = boosted_spec(f);
  const FoldPlan outer = stratified_kfold(target_vector(f), 3, 25);
  const NestedCvResult nested =
      nested_cv(base, {base.model}, f, outer, 3, 26, false);
  for (const auto& fold : nested.folds) {
    CHECK(spec_to_json(fold.chosen_params).dump() ==
          spec_to_json(base.model).dump());
    CHECK(fold.chosen_features == base.features);
  }
  REQUIRE(nested.folds.size() == 3);
}

TEST_CASE("default grids cover the documented candidates") {
  ModelSpec boosted;
  boosted.family = ModelFamily::Boosted;
  CHECK(default_grid(boosted, 26).size() == 9);  // depth {3,6,9} x lambda {0.1,1,10}
  ModelSpec forest;
  forest.family = ModelFamily::Forest;
  const auto fg = default_grid(forest, 26);
  CHECK(fg.size() == 4);  // trees {100,300} x feature rule {sqrt, d/3}
  CHECK(fg[0].forest.max_features == 6);  // ceil(sqrt(26))
  CHECK(fg[1].forest.max_features == 8);  // 26/3
  ModelSpec logistic;
  logistic.family = ModelFamily::Logistic;
  CHECK(default_grid(logistic, 26).size() == 1);
}

TEST_CASE("holdout split is stratified and disjoint") {
  Rng rng(27);
  std::vector<int> y(200);
  for (auto& v : y) v = rng.uniform() < 0.5 ? 1 : 0;
  const auto [train, test] = holdout_split(y, 0.25, 28);
  CHECK(train.size() + test.size() == 200);
  std::set<std::size_t> seen(train.begin(), train.end());
  for (std::size_t r : test) CHECK(!seen.count(r));
  double test_pos = 0, all_pos = 0;
  for (std::size_t r : test) test_pos += y[r];
  for (int v : y) all_pos += v;
  CHECK(std::fabs(test_pos / double(test.size()) - all_pos / 200.0) < 0.05);
  CHECK_THROWS_AS(holdout_split(y, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(holdout_split(y, 1.0, 1), std::invalid_argument);
}
