#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "salecast/frame.hpp"

namespace salecast {

struct EncodeParams {
  double k = 20.0;  // additive smoothing pseudo-count
  int n_folds = 5;
};

// How a category is derived from the source column at apply time.
enum class CatDerivation {
  Identity,     // raw integer code
  SaleYear,     // year of a DateMonth column
  SaleMonth,    // month-of-year of a DateMonth column
  BuildDecade,  // floor(year/10)*10
  BuildYear,
};

// Smoothed out-of-fold target-mean encoder state for one column.
// enc(c) = (sum_target_oof(c) + k*prior_oof) / (count_oof(c) + k) for
// training rows; inference uses the full-training statistics and the global
// prior. Unseen categories map to the prior.
struct EncodingMap {
  std::string source;
  std::string output;
  CatDerivation derivation = CatDerivation::Identity;
  double prior = 0.0;  // global training target mean
  double k = 20.0;
  int n_folds = 5;

  // category -> per-fold (sum_target, count)
  std::map<long long, std::vector<std::pair<double, long long>>> fold_stats;
  std::vector<double> fold_target_sum;
  std::vector<long long> fold_count;
  std::vector<int> fold_of_row;  // training-row fold assignment

  long long category_of(const Frame& frame, std::size_t row) const;
  double encode_inference(long long cat) const;
  double encode_oof(long long cat, int fold) const;
};

EncodingMap fit_mean_encoding(const Frame& frame, const std::string& column,
                              const std::string& target, double k, int n_folds,
                              std::uint64_t seed,
                              CatDerivation derivation = CatDerivation::Identity,
                              const std::string& output = "");

// Replaces the source column (or adds the output column) with full-training
// smoothed statistics. Rejects a column that is no longer categorical.
Frame apply_encoding(const Frame& frame, const EncodingMap& map);

// Training-row variant: each row is encoded with its own fold's complement
// statistics. The frame must be the one the map was fitted on.
Frame apply_encoding_oof(const Frame& frame, const EncodingMap& map);

struct YearFeatureMaps {
  EncodingMap ys1;  // sale year
  EncodingMap ys2;  // sale month-of-year
  EncodingMap yb1;  // build-year decade
  EncodingMap yb2;  // exact build year
};

YearFeatureMaps fit_year_features(const Frame& frame, const std::string& target,
                                  double k, int n_folds, std::uint64_t seed);

// Adds ys1,ys2,yb1,yb2 and drops the raw year-derived inputs
// (year_sale, month_sale, age, yrblt) from the model-input set.
Frame apply_year_features(const Frame& frame, const YearFeatureMaps& maps,
                          bool out_of_fold);

}  // namespace salecast
