#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "salecast/gbt.hpp"
#include "salecast/linear.hpp"
#include "salecast/matrix.hpp"
#include "salecast/tree.hpp"

namespace salecast {

enum class ModelFamily { Logistic, Forest, Boosted, Voting };
enum class VotingMode { Hard, Soft };

struct LogisticParams {
  double l2 = 1e-4;
  std::size_t max_iters = 500;
  double tol = 1e-6;
};

struct ModelSpec {
  ModelFamily family = ModelFamily::Boosted;
  LogisticParams logistic;
  ForestParams forest;
  BoostParams boost;
  VotingMode voting_mode = VotingMode::Soft;
};

std::string family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

// Uniform fitted-model interface across the four families.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual double predict_proba(std::span<const double> x) const = 0;
  virtual int predict_class(std::span<const double> x) const {
    return predict_proba(x) >= 0.5 ? 1 : 0;
  }
  // nonnegative, sums to 1 (or all-zero for a model that never split)
  virtual std::vector<double> importance() const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual std::string family() const = 0;
};

std::unique_ptr<Classifier> fit_classifier(const ModelSpec& spec,
                                           const Matrix& X,
                                           const std::vector<int>& y,
                                           std::uint64_t seed,
                                           int n_threads = 0);

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

// Hard/soft committee over already-fitted members.
class VotingClassifier : public Classifier {
 public:
  VotingClassifier(std::vector<std::unique_ptr<Classifier>> members,
                   VotingMode mode);
  double predict_proba(std::span<const double> x) const override;
  int predict_class(std::span<const double> x) const override;
  std::vector<double> importance() const override;
  nlohmann::json to_json() const override;
  std::string family() const override { return "voting"; }

 private:
  std::vector<std::unique_ptr<Classifier>> members_;
  VotingMode mode_;
};

}  // namespace salecast
