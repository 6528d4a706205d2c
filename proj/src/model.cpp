#include "salecast/model.hpp"

#include <stdexcept>

#include "salecast/rng.hpp"

namespace salecast {

using nlohmann::json;

std::string family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::Logistic: return "logistic";
    case ModelFamily::Forest: return "forest";
    case ModelFamily::Boosted: return "boosted";
    case ModelFamily::Voting: return "voting";
  }
  return "?";
}

ModelFamily family_from_name(const std::string& name) {
  if (name == "logistic") return ModelFamily::Logistic;
  if (name == "forest") return ModelFamily::Forest;
  if (name == "boosted") return ModelFamily::Boosted;
  if (name == "voting") return ModelFamily::Voting;
  throw std::invalid_argument("unknown model family: " + name);
}

json spec_to_json(const ModelSpec& spec) {
  return json{
      {"family", family_name(spec.family)},
      {"logistic",
       {{"l2", spec.logistic.l2},
        {"max_iters", spec.logistic.max_iters},
        {"tol", spec.logistic.tol}}},
      {"forest",
       {{"n_trees", spec.forest.n_trees},
        {"max_depth", spec.forest.max_depth},
        {"min_samples_split", spec.forest.min_samples_split},
        {"max_features", spec.forest.max_features},
        {"bootstrap", spec.forest.bootstrap}}},
      {"boost",
       {{"n_rounds", spec.boost.n_rounds},
        {"eta", spec.boost.eta},
        {"lambda", spec.boost.lambda},
        {"gamma", spec.boost.gamma},
        {"max_depth", spec.boost.max_depth},
        {"min_child_hessian", spec.boost.min_child_hessian},
        {"base_score", spec.boost.base_score}}},
      {"voting_mode", spec.voting_mode == VotingMode::Hard ? "hard" : "soft"}};
}

// Missing keys keep their defaults, so partial config files stay valid.
ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  if (j.contains("family"))
    s.family = family_from_name(j.at("family").get<std::string>());
  if (j.contains("logistic")) {
    const auto& lg = j.at("logistic");
    s.logistic = {lg.value("l2", s.logistic.l2),
                  lg.value("max_iters", s.logistic.max_iters),
                  lg.value("tol", s.logistic.tol)};
  }
  if (j.contains("forest")) {
    const auto& fr = j.at("forest");
    s.forest = {fr.value("n_trees", s.forest.n_trees),
                fr.value("max_depth", s.forest.max_depth),
                fr.value("min_samples_split", s.forest.min_samples_split),
                fr.value("max_features", s.forest.max_features),
                fr.value("bootstrap", s.forest.bootstrap)};
  }
  if (j.contains("boost")) {
    const auto& bs = j.at("boost");
    s.boost = {bs.value("n_rounds", s.boost.n_rounds),
               bs.value("eta", s.boost.eta),
               bs.value("lambda", s.boost.lambda),
               bs.value("gamma", s.boost.gamma),
               bs.value("max_depth", s.boost.max_depth),
               bs.value("min_child_hessian", s.boost.min_child_hessian),
               bs.value("base_score", s.boost.base_score)};
  }
  if (j.value("voting_mode", "soft") == std::string("hard"))
    s.voting_mode = VotingMode::Hard;
  return s;
}

namespace {

class LogisticClassifier : public Classifier {
 public:
  explicit LogisticClassifier(LinearModel m) : m_(std::move(m)) {}
  double predict_proba(std::span<const double> x) const override {
    return predict_proba_logistic(m_, x);
  }
  std::vector<double> importance() const override {
    // magnitude of standardized weights, normalized
    std::vector<double> imp(m_.weights.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < imp.size(); ++i) {
      imp[i] = std::fabs(m_.weights[i]);
      total += imp[i];
    }
    if (total > 0)
      for (auto& v : imp) v /= total;
    return imp;
  }
  json to_json() const override {
    return json{{"family", "logistic"}, {"weights", m_.weights},
                {"bias", m_.bias},      {"l2", m_.l2},
                {"mean", m_.feature_mean}, {"sd", m_.feature_sd}};
  }
  std::string family() const override { return "logistic"; }
  const LinearModel& model() const { return m_; }

 private:
  LinearModel m_;
};

class ForestClassifier : public Classifier {
 public:
  explicit ForestClassifier(ForestModel m) : m_(std::move(m)) {}
  double predict_proba(std::span<const double> x) const override {
    return predict_proba_forest(m_, x);
  }
  std::vector<double> importance() const override {
    return impurity_importance(m_);
  }
  json to_json() const override {
    json trees = json::array();
    for (const auto& t : m_.trees) {
      json nodes = json::array();
      for (const auto& n : t.nodes)
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right,
                                     n.count0, n.count1, n.probability}));
      trees.push_back(std::move(nodes));
    }
    return json{{"family", "forest"},
                {"n_features", m_.n_features},
                {"seed", m_.seed},
                {"params",
                 {{"n_trees", m_.params.n_trees},
                  {"max_depth", m_.params.max_depth},
                  {"min_samples_split", m_.params.min_samples_split},
                  {"max_features", m_.params.max_features},
                  {"bootstrap", m_.params.bootstrap}}},
                {"trees", std::move(trees)}};
  }
  std::string family() const override { return "forest"; }
  const ForestModel& model() const { return m_; }

 private:
  ForestModel m_;
};

class BoostedClassifier : public Classifier {
 public:
  explicit BoostedClassifier(BoostedModel m) : m_(std::move(m)) {}
  double predict_proba(std::span<const double> x) const override {
    return predict_proba_boosted(m_, x);
  }
  std::vector<double> importance() const override {
    return gain_importance(m_);
  }
  json to_json() const override {
    json trees = json::array();
    for (const auto& t : m_.trees) {
      json nodes = json::array();
      for (const auto& n : t.nodes)
        nodes.push_back(json::array(
            {n.feature, n.threshold, n.left, n.right, n.weight, n.gain}));
      trees.push_back(json{{"leaf_count", t.leaf_count},
                           {"nodes", std::move(nodes)}});
    }
    return json{{"family", "boosted"},
                {"n_features", m_.n_features},
                {"params",
                 {{"n_rounds", m_.params.n_rounds},
                  {"eta", m_.params.eta},
                  {"lambda", m_.params.lambda},
                  {"gamma", m_.params.gamma},
                  {"max_depth", m_.params.max_depth},
                  {"min_child_hessian", m_.params.min_child_hessian},
                  {"base_score", m_.params.base_score}}},
                {"trees", std::move(trees)}};
  }
  std::string family() const override { return "boosted"; }
  const BoostedModel& model() const { return m_; }

 private:
  BoostedModel m_;
};

}  // namespace

VotingClassifier::VotingClassifier(
    std::vector<std::unique_ptr<Classifier>> members, VotingMode mode)
    : members_(std::move(members)), mode_(mode) {
  if (members_.empty()) throw std::invalid_argument("empty voting committee");
}

double VotingClassifier::predict_proba(std::span<const double> x) const {
  if (mode_ == VotingMode::Soft) {
    double sum = 0.0;
    for (const auto& m : members_) sum += m->predict_proba(x);
    return sum / static_cast<double>(members_.size());
  }
  std::size_t votes = 0;
  for (const auto& m : members_) votes += m->predict_class(x);
  return static_cast<double>(votes) / static_cast<double>(members_.size());
}

int VotingClassifier::predict_class(std::span<const double> x) const {
  if (mode_ == VotingMode::Soft) return predict_proba(x) >= 0.5 ? 1 : 0;
  std::size_t votes = 0;
  for (const auto& m : members_) votes += m->predict_class(x);
  // exact ties go to class 0
  return 2 * votes > members_.size() ? 1 : 0;
}

std::vector<double> VotingClassifier::importance() const {
  std::vector<double> imp;
  for (const auto& m : members_) {
    auto mi = m->importance();
    if (imp.empty()) imp.assign(mi.size(), 0.0);
    for (std::size_t i = 0; i < mi.size(); ++i) imp[i] += mi[i];
  }
  double total = 0.0;
  for (double v : imp) total += v;
  if (total > 0)
    for (auto& v : imp) v /= total;
  return imp;
}

json VotingClassifier::to_json() const {
  json members = json::array();
  for (const auto& m : members_) members.push_back(m->to_json());
  return json{{"family", "voting"},
              {"mode", mode_ == VotingMode::Hard ? "hard" : "soft"},
              {"members", std::move(members)}};
}

std::unique_ptr<Classifier> fit_classifier(const ModelSpec& spec,
                                           const Matrix& X,
                                           const std::vector<int>& y,
                                           std::uint64_t seed, int n_threads) {
  switch (spec.family) {
    case ModelFamily::Logistic:
      return std::make_unique<LogisticClassifier>(fit_logistic(
          X, y, spec.logistic.l2, spec.logistic.max_iters, spec.logistic.tol));
    case ModelFamily::Forest:
      return std::make_unique<ForestClassifier>(
          fit_forest(X, y, spec.forest, seed, n_threads));
    case ModelFamily::Boosted:
      return std::make_unique<BoostedClassifier>(
          fit_boosted(X, y, spec.boost, seed, n_threads));
    case ModelFamily::Voting: {
      // committee mirrors the studied model set: logistic + forest + boosted
      std::vector<std::unique_ptr<Classifier>> members;
      ModelSpec sub = spec;
      sub.family = ModelFamily::Logistic;
      members.push_back(fit_classifier(sub, X, y, derive_seed(seed, 1), n_threads));
      sub.family = ModelFamily::Forest;
      members.push_back(fit_classifier(sub, X, y, derive_seed(seed, 2), n_threads));
      sub.family = ModelFamily::Boosted;
      members.push_back(fit_classifier(sub, X, y, derive_seed(seed, 3), n_threads));
      return std::make_unique<VotingClassifier>(std::move(members),
                                                spec.voting_mode);
    }
  }
  throw std::logic_error("unreachable");
}

std::unique_ptr<Classifier> classifier_from_json(const json& j) {
  const std::string fam = j.at("family");
  if (fam == "logistic") {
    LinearModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias");
    m.l2 = j.at("l2");
    m.feature_mean = j.at("mean").get<std::vector<double>>();
    m.feature_sd = j.at("sd").get<std::vector<double>>();
    return std::make_unique<LogisticClassifier>(std::move(m));
  }
  if (fam == "forest") {
    ForestModel m;
    m.n_features = j.at("n_features");
    m.seed = j.at("seed");
    const auto& p = j.at("params");
    m.params = {p.at("n_trees"), p.at("max_depth"), p.at("min_samples_split"),
                p.at("max_features"), p.at("bootstrap")};
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt) {
        TreeNode n;
        n.feature = jn[0];
        n.threshold = jn[1];
        n.left = jn[2];
        n.right = jn[3];
        n.count0 = jn[4];
        n.count1 = jn[5];
        n.probability = jn[6];
        t.nodes.push_back(n);
      }
      m.trees.push_back(std::move(t));
    }
    return std::make_unique<ForestClassifier>(std::move(m));
  }
  if (fam == "boosted") {
    BoostedModel m;
    m.n_features = j.at("n_features");
    const auto& p = j.at("params");
    m.params = {p.at("n_rounds"),  p.at("eta"),
                p.at("lambda"),    p.at("gamma"),
                p.at("max_depth"), p.at("min_child_hessian"),
                p.at("base_score")};
    for (const auto& jt : j.at("trees")) {
      BoostedTree t;
      t.leaf_count = jt.at("leaf_count");
      for (const auto& jn : jt.at("nodes")) {
        BoostNode n;
        n.feature = jn[0];
        n.threshold = jn[1];
        n.left = jn[2];
        n.right = jn[3];
        n.weight = jn[4];
        n.gain = jn[5];
        t.nodes.push_back(n);
      }
      m.trees.push_back(std::move(t));
    }
    return std::make_unique<BoostedClassifier>(std::move(m));
  }
  if (fam == "voting") {
    std::vector<std::unique_ptr<Classifier>> members;
    for (const auto& jm : j.at("members"))
      members.push_back(classifier_from_json(jm));
    return std::make_unique<VotingClassifier>(
        std::move(members),
        j.at("mode") == "hard" ? VotingMode::Hard : VotingMode::Soft);
  }
  throw std::invalid_argument("unknown model family in artifact: " + fam);
}

}  // namespace salecast
