#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "salecast/gbt.hpp"
#include "salecast/rng.hpp"

using namespace salecast;

namespace {

Matrix make_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
  return m;
}

double ce_of_logit(double z, int y) {
  const double p = sigmoid_logit(z);
  return -(y * std::log(p) + (1 - y) * std::log(1 - p));
}

double mean_logloss(const BoostedModel& m, const Matrix& X,
                    const std::vector<int>& y) {
  double s = 0;
  for (std::size_t r = 0; r < X.rows; ++r) {
    double p = predict_proba_boosted(m, X.row(r));
    p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
    s += -(y[r] * std::log(p) + (1 - y[r]) * std::log(1 - p));
  }
  return s / double(X.rows);
}

// golden-section minimization of G*w + (H+lambda)*w^2/2
double golden_min(double G, double H, double lambda) {
  // extended precision so the argmin resolves beyond sqrt(double epsilon)
  long double lo = -1100, hi = 1100;  // covers |G|/lambda at the smallest lambda
  const long double phi = (std::sqrt(5.0L) - 1) / 2;
  auto f = [&](long double w) {
    return (long double)G * w + 0.5L * ((long double)H + (long double)lambda) * w * w;
  };
  long double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  for (int i = 0; i < 300; ++i) {
    if (f(a) < f(b)) hi = b;
    else lo = a;
    a = hi - phi * (hi - lo);
    b = lo + phi * (hi - lo);
  }
  return double((lo + hi) / 2);
}

}  // namespace

TEST_CASE("gradient and hessian analytic values") {
  {
    const auto [g, h] = logloss_grad_hess(0.5, 1);
    CHECK(g == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(h == doctest::Approx(0.25).epsilon(1e-15));
  }
  {
    const auto [g, h] = logloss_grad_hess(0.5, 0);
    CHECK(g == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("gradient and hessian match central finite differences") {
  Rng rng(21);
  for (int it = 0; it < 1000; ++it) {
    const double z = 6.0 * (rng.uniform() - 0.5);
    const int y = rng.uniform() < 0.5 ? 1 : 0;
    const double p = sigmoid_logit(z);
    const auto [g, h] = logloss_grad_hess(p, y);
    const double eps = 1e-5;
    const double fd_g =
        (ce_of_logit(z + eps, y) - ce_of_logit(z - eps, y)) / (2 * eps);
    const double fd_h = (ce_of_logit(z + eps, y) - 2 * ce_of_logit(z, y) +
                         ce_of_logit(z - eps, y)) /
                        (eps * eps);
    CHECK(g == doctest::Approx(fd_g).epsilon(1e-6));
    CHECK(h == doctest::Approx(fd_h).epsilon(1e-4));
  }
}

TEST_CASE("leaf weight closed form") {
  CHECK(leaf_weight(2, 3, 1) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(leaf_weight(0, 5, 1) == 0.0);
}

TEST_CASE("leaf weight matches golden-section minimization") {
  Rng rng(22);
  for (int it = 0; it < 200; ++it) {
    const double G = 20 * (rng.uniform() - 0.5);
    const double H = 10 * rng.uniform();
    const double lambda = 0.01 + 5 * rng.uniform();
    CHECK(leaf_weight(G, H, lambda) ==
          doctest::Approx(golden_min(G, H, lambda)).epsilon(1e-8));
  }
}

TEST_CASE("split gain plug-in value") {
  CHECK(split_gain(-2, 1, 2, 1, 1, 0) == doctest::Approx(2.0).epsilon(1e-15));
  // identical child statistics without regularization: no separation, -gamma
  CHECK(split_gain(1, 2, 1, 2, 0, 0.7) == doctest::Approx(-0.7).epsilon(1e-15));
}

TEST_CASE("split gain equals the objective difference") {
  Rng rng(23);
  for (int it = 0; it < 200; ++it) {
    const double GL = 10 * (rng.uniform() - 0.5), GR = 10 * (rng.uniform() - 0.5);
    const double HL = 5 * rng.uniform(), HR = 5 * rng.uniform();
    const double lambda = 0.1 + 2 * rng.uniform(), gamma = rng.uniform();
    auto obj = [&](double G, double H) {
      const double w = leaf_weight(G, H, lambda);
      return G * w + 0.5 * (H + lambda) * w * w;
    };
    const double before = obj(GL + GR, HL + HR);
    const double after = obj(GL, HL) + obj(GR, HR);
    CHECK(split_gain(GL, HL, GR, HR, lambda, gamma) ==
          doctest::Approx(before - after - gamma).epsilon(1e-10));
  }
}

TEST_CASE("no acceptable split leaves all predictions at base score") {
  // constant feature: no split candidates exist at all
  const Matrix X = make_matrix({{1}, {1}, {1}, {1}});
  const std::vector<int> y{0, 1, 0, 1};
  BoostParams p;
  p.n_rounds = 10;
  const BoostedModel m = fit_boosted(X, y, p, 1);
  for (std::size_t r = 0; r < 4; ++r)
    CHECK(predict_proba_boosted(m, X.row(r)) == p.base_score);
}

TEST_CASE("separable pair reaches training accuracy 1") {
  const Matrix X = make_matrix({{0}, {1}});
  const std::vector<int> y{0, 1};
  BoostParams p;
  p.n_rounds = 100;
  p.min_child_hessian = 0.0;  // two-row children have hessian 0.25
  const BoostedModel m = fit_boosted(X, y, p, 1);
  CHECK(predict_proba_boosted(m, X.row(0)) < 0.5);
  CHECK(predict_proba_boosted(m, X.row(1)) > 0.5);
}

TEST_CASE("training log-loss is monotone non-increasing round by round") {
  Rng rng(24);
  for (int it = 0; it < 5; ++it) {
    const std::size_t n = 300;
    Matrix X(n, 3);
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < 3; ++c) X.at(r, c) = rng.normal();
      y[r] = X.at(r, 0) + 0.5 * rng.normal() > 0 ? 1 : 0;
    }
    BoostParams p;
    p.n_rounds = 40;
    p.max_depth = 3;
    const BoostedModel full = fit_boosted(X, y, p, 30 + it);
    BoostedModel partial = full;
    double prev = mean_logloss({{}, p, full.n_features}, X, y);
    for (std::size_t k = 1; k <= full.trees.size(); ++k) {
      partial.trees.assign(full.trees.begin(), full.trees.begin() + k);
      const double cur = mean_logloss(partial, X, y);
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("prediction composes base score, learning rate and leaf sums") {
  Rng rng(25);
  Matrix X(50, 2);
  std::vector<int> y(50);
  for (std::size_t r = 0; r < 50; ++r) {
    X.at(r, 0) = rng.uniform();
    X.at(r, 1) = rng.uniform();
    y[r] = X.at(r, 0) > X.at(r, 1) ? 1 : 0;
  }
  BoostParams p;
  p.n_rounds = 10;
  p.max_depth = 2;
  const BoostedModel m = fit_boosted(X, y, p, 31);
  const double base = std::log(p.base_score / (1 - p.base_score));
  for (std::size_t r = 0; r < 50; ++r) {
    double z = base;
    for (const auto& t : m.trees) z += p.eta * t.value(X.row(r));
    CHECK(predict_logit_boosted(m, X.row(r)) == doctest::Approx(z).epsilon(1e-12));
    CHECK(predict_proba_boosted(m, X.row(r)) ==
          doctest::Approx(sigmoid_logit(z)).epsilon(1e-12));
  }
}

TEST_CASE("empty model predicts the base score") {
  BoostedModel m;
  m.params.base_score = 0.5;
  m.n_features = 2;
  const double x[2] = {1, 2};
  CHECK(predict_proba_boosted(m, {x, 2}) == 0.5);
}

TEST_CASE("gain importance normalization") {
  Rng rng(26);
  Matrix X(150, 4);
  std::vector<int> y(150);
  for (std::size_t r = 0; r < 150; ++r) {
    for (std::size_t c = 0; c < 4; ++c) X.at(r, c) = rng.normal();
    y[r] = X.at(r, 1) > 0 ? 1 : 0;
  }
  BoostParams p;
  p.n_rounds = 20;
  p.max_depth = 3;
  const auto imp = gain_importance(fit_boosted(X, y, p, 33));
  REQUIRE(imp.size() == 4);
  const double sum = std::accumulate(imp.begin(), imp.end(), 0.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // the single informative feature dominates
  CHECK(imp[1] > 0.8);
}

TEST_CASE("boosted fitting is independent of the thread count") {
  Rng rng(27);
  Matrix X(200, 5);
  std::vector<int> y(200);
  for (std::size_t r = 0; r < 200; ++r) {
    for (std::size_t c = 0; c < 5; ++c) X.at(r, c) = rng.normal();
    y[r] = X.at(r, 0) - X.at(r, 3) > 0 ? 1 : 0;
  }
  BoostParams p;
  p.n_rounds = 15;
  const BoostedModel serial = fit_boosted(X, y, p, 77, 1);
  const BoostedModel parallel = fit_boosted(X, y, p, 77, 0);
  REQUIRE(serial.trees.size() == parallel.trees.size());
  for (std::size_t r = 0; r < 200; ++r)
    CHECK(predict_logit_boosted(serial, X.row(r)) ==
          predict_logit_boosted(parallel, X.row(r)));
}
