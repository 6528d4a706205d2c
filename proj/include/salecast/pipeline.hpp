#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "salecast/encode.hpp"
#include "salecast/frame.hpp"
#include "salecast/model.hpp"

namespace salecast {

Matrix to_matrix(const Frame& frame, const std::vector<std::string>& features);
std::vector<int> target_vector(const Frame& frame,
                               const std::string& target = "price_high_low");

// A model plus the feature transform it is trained behind. With encode on,
// categorical inputs are replaced in place by smoothed target means and the
// year-derived inputs by their encoded counterparts (year_sale -> ys1,
// month_sale -> ys2, yrblt -> yb1, age -> yb2), keeping the feature count
// and order. Training rows see out-of-fold statistics, inference rows the
// full-training statistics.
struct PipelineSpec {
  ModelSpec model;
  std::vector<std::string> features;
  bool encode = false;
  EncodeParams enc;
};

struct FittedPipeline {
  std::vector<std::string> input_features;
  std::vector<std::string> features;  // post-encoding, same order/length
  std::vector<EncodingMap> encodings;
  std::unique_ptr<Classifier> model;

  // applies inference-time encodings
  Frame transform(const Frame& frame) const;
  std::vector<double> predict_proba(const Frame& frame) const;
  std::vector<int> predict_class(const Frame& frame) const;

  nlohmann::json to_json() const;
  static FittedPipeline from_json(const nlohmann::json& j);
};

FittedPipeline fit_pipeline(const PipelineSpec& spec, const Frame& train,
                            std::uint64_t seed, int n_threads = 0);

}  // namespace salecast
