#include "salecast/pipeline.hpp"

#include <algorithm>

#include "salecast/rng.hpp"

namespace salecast {

using nlohmann::json;

Matrix to_matrix(const Frame& frame, const std::vector<std::string>& features) {
  Matrix m(frame.n_rows(), features.size());
  for (std::size_t c = 0; c < features.size(); ++c) {
    const auto& col = frame.column(features[c]);
    for (std::size_t r = 0; r < frame.n_rows(); ++r)
      m.at(r, c) = col.values[r];
  }
  return m;
}

std::vector<int> target_vector(const Frame& frame, const std::string& target) {
  const auto& col = frame.column(target);
  std::vector<int> y(col.values.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = col.values[i] != 0.0 ? 1 : 0;
  return y;
}

namespace {

struct YearMapping {
  const char* source;
  CatDerivation derivation;
  const char* output;
};

constexpr YearMapping kYearMappings[] = {
    {"year_sale", CatDerivation::SaleYear, "ys1"},
    {"month_sale", CatDerivation::SaleMonth, "ys2"},
    {"yrblt", CatDerivation::BuildDecade, "yb1"},
    {"age", CatDerivation::BuildYear, "yb2"},
};

const YearMapping* year_mapping(const std::string& feature) {
  for (const auto& m : kYearMappings)
    if (feature == m.source) return &m;
  return nullptr;
}

}  // namespace

FittedPipeline fit_pipeline(const PipelineSpec& spec, const Frame& train,
                            std::uint64_t seed, int n_threads) {
  FittedPipeline fp;
  fp.input_features = spec.features;
  Frame work = train;
  if (spec.encode) {
    for (std::size_t i = 0; i < spec.features.size(); ++i) {
      const auto& f = spec.features[i];
      if (const YearMapping* ym = year_mapping(f)) {
        EncodingMap map =
            fit_mean_encoding(train, f, "price_high_low", spec.enc.k,
                              spec.enc.n_folds, derive_seed(seed, 1000 + i),
                              ym->derivation, ym->output);
        work = apply_encoding_oof(work, map);
        fp.features.push_back(ym->output);
        fp.encodings.push_back(std::move(map));
      } else if (train.column(f).kind == ColumnKind::CategoricalInteger) {
        EncodingMap map =
            fit_mean_encoding(train, f, "price_high_low", spec.enc.k,
                              spec.enc.n_folds, derive_seed(seed, 1000 + i));
        work = apply_encoding_oof(work, map);
        fp.features.push_back(f);
        fp.encodings.push_back(std::move(map));
      } else {
        fp.features.push_back(f);
      }
    }
  } else {
    fp.features = spec.features;
  }

  const Matrix X = to_matrix(work, fp.features);
  const std::vector<int> y = target_vector(work);
  fp.model = fit_classifier(spec.model, X, y, derive_seed(seed, 3000), n_threads);
  return fp;
}

Frame FittedPipeline::transform(const Frame& frame) const {
  Frame out = frame;
  // year-derived maps add new columns; categorical maps replace in place.
  // Raw source columns left behind are simply not part of `features`.
  for (const auto& map : encodings) out = apply_encoding(out, map);
  return out;
}

std::vector<double> FittedPipeline::predict_proba(const Frame& frame) const {
  const Frame t = transform(frame);
  const Matrix X = to_matrix(t, features);
  std::vector<double> p(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r)
    p[r] = model->predict_proba(X.row(r));
  return p;
}

std::vector<int> FittedPipeline::predict_class(const Frame& frame) const {
  const Frame t = transform(frame);
  const Matrix X = to_matrix(t, features);
  std::vector<int> c(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r)
    c[r] = model->predict_class(X.row(r));
  return c;
}

namespace {

json encoding_to_json(const EncodingMap& m) {
  json stats = json::array();
  for (const auto& [cat, folds] : m.fold_stats) {
    double sum = 0.0;
    long long count = 0;
    for (const auto& [s, c] : folds) {
      sum += s;
      count += c;
    }
    stats.push_back(json::array({cat, sum, count}));
  }
  return json{{"source", m.source},
              {"output", m.output},
              {"derivation", static_cast<int>(m.derivation)},
              {"prior", m.prior},
              {"k", m.k},
              {"n_folds", m.n_folds},
              {"stats", std::move(stats)}};
}

// Inference-only reconstruction; the per-fold structure is collapsed.
EncodingMap encoding_from_json(const json& j) {
  EncodingMap m;
  m.source = j.at("source");
  m.output = j.at("output");
  m.derivation = static_cast<CatDerivation>(j.at("derivation").get<int>());
  m.prior = j.at("prior");
  m.k = j.at("k");
  m.n_folds = j.at("n_folds");
  for (const auto& row : j.at("stats")) {
    const long long cat = row[0];
    m.fold_stats[cat] = {{row[1].get<double>(), row[2].get<long long>()}};
  }
  return m;
}

}  // namespace

json FittedPipeline::to_json() const {
  json encs = json::array();
  for (const auto& m : encodings) encs.push_back(encoding_to_json(m));
  return json{{"input_features", input_features},
              {"features", features},
              {"encodings", std::move(encs)},
              {"model", model->to_json()}};
}

FittedPipeline FittedPipeline::from_json(const json& j) {
  FittedPipeline fp;
  fp.input_features = j.at("input_features").get<std::vector<std::string>>();
  fp.features = j.at("features").get<std::vector<std::string>>();
  for (const auto& jm : j.at("encodings"))
    fp.encodings.push_back(encoding_from_json(jm));
  fp.model = classifier_from_json(j.at("model"));
  return fp;
}

}  // namespace salecast
