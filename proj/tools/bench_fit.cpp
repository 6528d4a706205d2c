// Compares serial vs OpenMP-parallel model fitting on synthetic data and
// verifies that the two produce identical predictions.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "salecast/gbt.hpp"
#include "salecast/pipeline.hpp"
#include "salecast/synth.hpp"
#include "salecast/tree.hpp"

using namespace salecast;
using clk = std::chrono::steady_clock;

namespace {

double seconds_since(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t rows = 20000;
  if (argc > 1) rows = std::stoul(argv[1]);

  SynthConfig sc;
  sc.n_rows = rows;
  sc.seed = 7;
  SynthResult data = generate_synth(sc);

  Frame f = derive_target(data.market);
  f = join_socio(f, data.socio);
  f = prepare(f);
  const auto features = f.feature_names();
  const Matrix X = to_matrix(f, features);
  const auto y = target_vector(f);
  std::printf("benchmark: %zu rows, %zu features\n", X.rows, X.cols);

  {
    ForestParams fp;
    fp.n_trees = 100;
    auto t0 = clk::now();
    const ForestModel serial = fit_forest_serial(X, y, fp, 42);
    const double ts = seconds_since(t0);
    t0 = clk::now();
    const ForestModel parallel = fit_forest(X, y, fp, 42);
    const double tp = seconds_since(t0);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i)
      max_diff = std::max(max_diff,
                          std::fabs(predict_proba_forest(serial, X.row(i)) -
                                    predict_proba_forest(parallel, X.row(i))));
    std::printf("forest (%zu trees): serial %.2fs, parallel %.2fs, "
                "speedup %.2fx, max |diff| %g\n",
                fp.n_trees, ts, tp, ts / tp, max_diff);
  }

  {
    BoostParams bp;
    bp.n_rounds = 50;
    auto t0 = clk::now();
    const BoostedModel serial = fit_boosted(X, y, bp, 42, 1);
    const double ts = seconds_since(t0);
    t0 = clk::now();
    const BoostedModel parallel = fit_boosted(X, y, bp, 42, 0);
    const double tp = seconds_since(t0);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i)
      max_diff = std::max(max_diff,
                          std::fabs(predict_proba_boosted(serial, X.row(i)) -
                                    predict_proba_boosted(parallel, X.row(i))));
    std::printf("boosted (%zu rounds): 1-thread %.2fs, parallel %.2fs, "
                "speedup %.2fx, max |diff| %g\n",
                bp.n_rounds, ts, tp, ts / tp, max_diff);
  }
  return 0;
}
