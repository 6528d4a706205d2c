#include "salecast/stack.hpp"

#include <algorithm>
#include <set>

#include "salecast/rng.hpp"

namespace salecast {

using nlohmann::json;

namespace {
const std::set<std::string> kSocioNames = {"gdp", "cpi", "ppi", "hpi", "effr"};
}

std::vector<std::string> socio_feature_list() {
  return {"gdp", "cpi", "ppi", "hpi", "effr"};
}

std::vector<std::string> joined_feature_list(const Frame& joined) {
  return joined.feature_names();
}

std::vector<std::string> market_feature_list(const Frame& joined) {
  std::vector<std::string> out;
  for (const auto& f : joined.feature_names())
    if (!kSocioNames.count(f)) out.push_back(f);
  return out;
}

std::pair<std::vector<double>, std::vector<double>> oof_meta_features(
    const Frame& joined, const StackConfig& config, std::uint64_t seed,
    int n_threads, const FoldPlan* custom_plan) {
  const auto y = target_vector(joined);
  const FoldPlan plan =
      custom_plan ? *custom_plan
                  : stratified_kfold(y, config.oof_folds, derive_seed(seed, 41));

  PipelineSpec socio_spec{config.generator, socio_feature_list(), false, {}};
  PipelineSpec market_spec{config.generator, joined_feature_list(joined),
                           false, {}};

  std::vector<double> f1(joined.n_rows(), 0.0), f2(joined.n_rows(), 0.0);
  for (int fold = 0; fold < plan.k; ++fold) {
    const Frame train = joined.select_rows(plan.complement_rows(fold));
    const auto rows = plan.fold_rows(fold);
    const Frame validation = joined.select_rows(rows);
    const FittedPipeline socio_fp = fit_pipeline(
        socio_spec, train, derive_seed(seed, 50 + fold), n_threads);
    const FittedPipeline market_fp = fit_pipeline(
        market_spec, train, derive_seed(seed, 70 + fold), n_threads);
    const auto p1 = socio_fp.predict_proba(validation);
    const auto p2 = market_fp.predict_proba(validation);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      f1[rows[i]] = p1[i];
      f2[rows[i]] = p2[i];
    }
  }
  return {std::move(f1), std::move(f2)};
}

StackedModel build_stack_joined(const Frame& joined, const StackConfig& config,
                                std::uint64_t seed, int n_threads) {
  auto [f1, f2] = oof_meta_features(joined, config, seed, n_threads);

  StackedModel model;
  PipelineSpec socio_spec{config.generator, socio_feature_list(), false, {}};
  PipelineSpec market_spec{config.generator, joined_feature_list(joined),
                           false, {}};
  model.socio_model =
      fit_pipeline(socio_spec, joined, derive_seed(seed, 90), n_threads);
  model.market_model =
      fit_pipeline(market_spec, joined, derive_seed(seed, 91), n_threads);

  Frame final_frame = joined;
  Column c1, c2;
  c1.kind = c2.kind = ColumnKind::NumericReal;
  c1.values = std::move(f1);
  c2.values = std::move(f2);
  final_frame.add_column("F1", std::move(c1));
  final_frame.add_column("F2", std::move(c2));

  PipelineSpec final_spec{config.final_model, joined_feature_list(joined),
                          config.encode, config.enc};
  final_spec.features.push_back("F1");
  final_spec.features.push_back("F2");
  model.final_model =
      fit_pipeline(final_spec, final_frame, derive_seed(seed, 92), n_threads);
  return model;
}

StackedModel build_stack(const Frame& market_frame, const SocioTable& socio,
                         const StackConfig& config, std::uint64_t seed,
                         int n_threads) {
  return build_stack_joined(join_socio(market_frame, socio), config, seed,
                            n_threads);
}

namespace {

Frame assemble_final_input(const StackedModel& model, const Frame& joined) {
  Frame out = joined;
  Column c1, c2;
  c1.kind = c2.kind = ColumnKind::NumericReal;
  c1.values = model.socio_model.predict_proba(joined);
  c2.values = model.market_model.predict_proba(joined);
  out.add_column("F1", std::move(c1));
  out.add_column("F2", std::move(c2));
  return out;
}

}  // namespace

std::vector<double> predict_stacked_proba(const StackedModel& model,
                                          const Frame& joined) {
  return model.final_model.predict_proba(assemble_final_input(model, joined));
}

std::vector<int> predict_stacked_class(const StackedModel& model,
                                       const Frame& joined) {
  return model.final_model.predict_class(assemble_final_input(model, joined));
}

json StackedModel::to_json() const {
  return json{{"socio_model", socio_model.to_json()},
              {"market_model", market_model.to_json()},
              {"final_model", final_model.to_json()}};
}

StackedModel StackedModel::from_json(const json& j) {
  StackedModel m;
  m.socio_model = FittedPipeline::from_json(j.at("socio_model"));
  m.market_model = FittedPipeline::from_json(j.at("market_model"));
  m.final_model = FittedPipeline::from_json(j.at("final_model"));
  return m;
}

namespace {

struct StageRunner {
  const Frame& joined;
  const StackConfig& config;
  std::uint64_t seed;
  int n_threads;

  std::vector<int> fit_and_predict(ModelFamily family, int stage,
                                   const Frame& train, const Frame& test) const {
    if (stage == 3) {
      StackConfig cfg = config;
      cfg.final_model.family = family;
      const StackedModel sm =
          build_stack_joined(train, cfg, derive_seed(seed, 310), n_threads);
      return predict_stacked_class(sm, test);
    }
    PipelineSpec spec;
    spec.model = config.final_model;
    spec.model.family = family;
    spec.features = stage == 1 ? market_feature_list(joined)
                               : joined_feature_list(joined);
    spec.encode = false;
    const FittedPipeline fp =
        fit_pipeline(spec, train, derive_seed(seed, 320 + stage), n_threads);
    return fp.predict_class(test);
  }

  EvalReport holdout_stage(ModelFamily family, int stage, double fraction) const {
    auto [train_rows, test_rows] =
        holdout_split(target_vector(joined), fraction, derive_seed(seed, 300));
    const Frame train = joined.select_rows(train_rows);
    const Frame test = joined.select_rows(test_rows);
    return report(target_vector(test),
                  fit_and_predict(family, stage, train, test));
  }

  // pooled out-of-fold predictions give one confusion matrix across folds
  EvalReport cv_stage(ModelFamily family, int stage, int k) const {
    const FoldPlan plan =
        stratified_kfold(target_vector(joined), k, derive_seed(seed, 301));
    std::vector<int> y_true, y_pred;
    for (int fold = 0; fold < k; ++fold) {
      const Frame train = joined.select_rows(plan.complement_rows(fold));
      const Frame test = joined.select_rows(plan.fold_rows(fold));
      const auto preds = fit_and_predict(family, stage, train, test);
      const auto truth = target_vector(test);
      y_true.insert(y_true.end(), truth.begin(), truth.end());
      y_pred.insert(y_pred.end(), preds.begin(), preds.end());
    }
    return report(y_true, y_pred);
  }
};

}  // namespace

std::vector<AblationRow> ablation_table(const Frame& market_frame,
                                        const SocioTable& socio,
                                        const StackConfig& config,
                                        const EvalProtocol& protocol,
                                        std::uint64_t seed, int n_threads) {
  const Frame joined = join_socio(market_frame, socio);
  StageRunner runner{joined, config, seed, n_threads};
  std::vector<AblationRow> rows;
  const ModelFamily families[4] = {ModelFamily::Logistic, ModelFamily::Boosted,
                                   ModelFamily::Forest, ModelFamily::Voting};
  for (int stage = 1; stage <= 3; ++stage) {
    for (ModelFamily fam : families) {
      AblationRow row;
      row.family = fam;
      row.stage = stage;
      row.report = protocol.kind == Protocol::Holdout
                       ? runner.holdout_stage(fam, stage,
                                              protocol.holdout_fraction)
                       : runner.cv_stage(fam, stage, protocol.cv_k);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace salecast
