#pragma once

#include <cstdint>
#include <vector>

#include "salecast/metrics.hpp"
#include "salecast/pipeline.hpp"
#include "salecast/tune.hpp"

namespace salecast {

// Four-layer architecture: market features (layer 1), socio join plus a
// parallel socio-only model (layer 2), out-of-fold meta-features F1/F2
// (layer 3), final classifier on 26 features + F1 + F2 (layer 4).
struct StackConfig {
  ModelSpec generator;    // F1/F2 generator family (boosted by default)
  ModelSpec final_model;
  int oof_folds = 5;
  bool encode = true;     // stage-3 mean encoding inside the final pipeline
  EncodeParams enc;
};

struct StackedModel {
  FittedPipeline socio_model;   // 5 socio inputs -> F1
  FittedPipeline market_model;  // 26 inputs -> F2
  FittedPipeline final_model;   // 28 inputs

  nlohmann::json to_json() const;
  static StackedModel from_json(const nlohmann::json& j);
};

// market_frame: prepared frame with the 21 market features + target.
StackedModel build_stack(const Frame& market_frame, const SocioTable& socio,
                         const StackConfig& config, std::uint64_t seed,
                         int n_threads = 0);

// joined: frame that already carries the socio columns (26 features + target).
StackedModel build_stack_joined(const Frame& joined, const StackConfig& config,
                                std::uint64_t seed, int n_threads = 0);

// Inference on rows of a joined frame: F1 and F2 come from the full-fit
// generators, then the final model scores the assembled 28-feature rows.
std::vector<double> predict_stacked_proba(const StackedModel& model,
                                          const Frame& joined);
std::vector<int> predict_stacked_class(const StackedModel& model,
                                       const Frame& joined);

// Training-time out-of-fold meta-features, exposed for the leakage tests.
// With a null plan the stratified fold plan is derived from (seed, targets).
std::pair<std::vector<double>, std::vector<double>> oof_meta_features(
    const Frame& joined, const StackConfig& config, std::uint64_t seed,
    int n_threads = 0, const FoldPlan* plan = nullptr);

enum class Protocol { Holdout, Cv };

struct EvalProtocol {
  Protocol kind = Protocol::Holdout;
  double holdout_fraction = 0.25;
  int cv_k = 10;
};

struct AblationRow {
  ModelFamily family;
  int stage;  // 1 = 21 features, 2 = 26, 3 = full stack (28)
  EvalReport report;
};

// One report per (model family, stage), mirroring the three result tables.
std::vector<AblationRow> ablation_table(const Frame& market_frame,
                                        const SocioTable& socio,
                                        const StackConfig& config,
                                        const EvalProtocol& protocol,
                                        std::uint64_t seed, int n_threads = 0);

// Feature lists for the staged runs.
std::vector<std::string> market_feature_list(const Frame& joined);
std::vector<std::string> socio_feature_list();
std::vector<std::string> joined_feature_list(const Frame& joined);

}  // namespace salecast
