#include "salecast/encode.hpp"

#include <cmath>
#include <numeric>

#include "salecast/rng.hpp"

namespace salecast {

namespace {

const std::string& source_for(CatDerivation d, const std::string& named) {
  static const std::string sale_date = "sale_date";
  static const std::string yrblt = "yrblt";
  switch (d) {
    case CatDerivation::SaleYear:
    case CatDerivation::SaleMonth:
      return sale_date;
    case CatDerivation::BuildDecade:
    case CatDerivation::BuildYear:
      return yrblt;
    default:
      return named;
  }
}

long long derive_cat(CatDerivation d, double raw) {
  switch (d) {
    case CatDerivation::SaleYear:
      return month_index_year(static_cast<int>(raw));
    case CatDerivation::SaleMonth:
      return month_index_month(static_cast<int>(raw));
    case CatDerivation::BuildDecade:
      return static_cast<long long>(std::floor(raw / 10.0)) * 10;
    case CatDerivation::BuildYear:
      return static_cast<long long>(raw);
    default:
      return static_cast<long long>(raw);
  }
}

}  // namespace

long long EncodingMap::category_of(const Frame& frame, std::size_t row) const {
  return derive_cat(derivation, frame.value(source, row));
}

double EncodingMap::encode_inference(long long cat) const {
  auto it = fold_stats.find(cat);
  if (it == fold_stats.end()) return prior;
  double sum = 0.0;
  long long count = 0;
  for (const auto& [s, c] : it->second) {
    sum += s;
    count += c;
  }
  return (sum + k * prior) / (static_cast<double>(count) + k);
}

double EncodingMap::encode_oof(long long cat, int fold) const {
  double total_sum = 0.0;
  long long total_count = 0;
  for (int j = 0; j < n_folds; ++j) {
    total_sum += fold_target_sum[j];
    total_count += fold_count[j];
  }
  // fold-complement prior keeps the encoding independent of in-fold targets
  const double oof_prior = (total_sum - fold_target_sum[fold]) /
                           static_cast<double>(total_count - fold_count[fold]);
  double sum = 0.0;
  long long count = 0;
  auto it = fold_stats.find(cat);
  if (it != fold_stats.end()) {
    for (int j = 0; j < n_folds; ++j) {
      if (j == fold) continue;
      sum += it->second[j].first;
      count += it->second[j].second;
    }
  }
  return (sum + k * oof_prior) / (static_cast<double>(count) + k);
}

EncodingMap fit_mean_encoding(const Frame& frame, const std::string& column,
                              const std::string& target, double k, int n_folds,
                              std::uint64_t seed, CatDerivation derivation,
                              const std::string& output) {
  if (n_folds < 2) throw DataError("n_folds must be >= 2");
  if (static_cast<std::size_t>(n_folds) > frame.n_rows())
    throw DataError("n_folds exceeds row count");
  if (k < 0.0) throw DataError("smoothing k must be nonnegative");

  const std::string& src = source_for(derivation, column);
  const Column& src_col = frame.column(src);
  const Column& tgt = frame.column(target);
  for (double v : tgt.values)
    if (v != 0.0 && v != 1.0) throw DataError("target must be binary");
  const double prior =
      std::accumulate(tgt.values.begin(), tgt.values.end(), 0.0) /
      static_cast<double>(frame.n_rows());
  if (prior == 0.0 || prior == 1.0)
    throw DataError("constant target: mean encoding is degenerate");

  EncodingMap map;
  map.source = src;
  map.output = output.empty() ? column : output;
  map.derivation = derivation;
  map.prior = prior;
  map.k = k;
  map.n_folds = n_folds;

  // shuffled round-robin fold assignment
  std::vector<std::size_t> order(frame.n_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, std::hash<std::string>{}(map.output)));
  rng.shuffle(order);
  map.fold_of_row.assign(frame.n_rows(), 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    map.fold_of_row[order[i]] = static_cast<int>(i % n_folds);

  map.fold_target_sum.assign(n_folds, 0.0);
  map.fold_count.assign(n_folds, 0);
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    const int fold = map.fold_of_row[r];
    const long long cat = derive_cat(derivation, src_col.values[r]);
    auto& stats = map.fold_stats[cat];
    if (stats.empty()) stats.assign(n_folds, {0.0, 0});
    stats[fold].first += tgt.values[r];
    stats[fold].second += 1;
    map.fold_target_sum[fold] += tgt.values[r];
    map.fold_count[fold] += 1;
  }
  return map;
}

namespace {

Frame apply_impl(const Frame& frame, const EncodingMap& map, bool oof) {
  if (oof && map.fold_of_row.size() != frame.n_rows())
    throw DataError("out-of-fold encoding requires the fitting frame");

  const bool replaces = map.output == map.source;
  if (replaces) {
    const Column& src = frame.column(map.source);
    if (src.kind != ColumnKind::CategoricalInteger)
      throw DataError("column already encoded: " + map.source);
  }

  Column enc;
  enc.kind = ColumnKind::NumericReal;
  enc.values.reserve(frame.n_rows());
  for (std::size_t r = 0; r < frame.n_rows(); ++r) {
    const long long cat = map.category_of(frame, r);
    enc.values.push_back(oof ? map.encode_oof(cat, map.fold_of_row[r])
                             : map.encode_inference(cat));
  }

  Frame out = frame;
  if (out.has_column(map.output)) out.drop_column(map.output);
  out.add_column(map.output, std::move(enc));
  return out;
}

}  // namespace

Frame apply_encoding(const Frame& frame, const EncodingMap& map) {
  return apply_impl(frame, map, false);
}

Frame apply_encoding_oof(const Frame& frame, const EncodingMap& map) {
  return apply_impl(frame, map, true);
}

YearFeatureMaps fit_year_features(const Frame& frame, const std::string& target,
                                  double k, int n_folds, std::uint64_t seed) {
  if (!frame.has_column("sale_date") || !frame.has_column("yrblt"))
    throw DataError("year features require sale_date and yrblt");
  YearFeatureMaps maps;
  maps.ys1 = fit_mean_encoding(frame, "ys1", target, k, n_folds, seed,
                               CatDerivation::SaleYear, "ys1");
  maps.ys2 = fit_mean_encoding(frame, "ys2", target, k, n_folds, seed,
                               CatDerivation::SaleMonth, "ys2");
  maps.yb1 = fit_mean_encoding(frame, "yb1", target, k, n_folds, seed,
                               CatDerivation::BuildDecade, "yb1");
  maps.yb2 = fit_mean_encoding(frame, "yb2", target, k, n_folds, seed,
                               CatDerivation::BuildYear, "yb2");
  return maps;
}

Frame apply_year_features(const Frame& frame, const YearFeatureMaps& maps,
                          bool out_of_fold) {
  Frame out = frame;
  for (const EncodingMap* m : {&maps.ys1, &maps.ys2, &maps.yb1, &maps.yb2})
    out = out_of_fold ? apply_encoding_oof(out, *m) : apply_encoding(out, *m);
  // the encoded features replace their raw year-derived sources
  for (const char* col : {"year_sale", "month_sale", "age", "yrblt"})
    if (out.has_column(col)) out.drop_column(col);
  return out;
}

}  // namespace salecast
