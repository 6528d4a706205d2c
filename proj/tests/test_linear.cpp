#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "salecast/linear.hpp"
#include "salecast/rng.hpp"

using namespace salecast;

namespace {

Matrix make_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
  return m;
}

}  // namespace

TEST_CASE("sigmoid identities") {
  CHECK(sigmoid(0) == 0.5);
  Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const double z = 20 * (rng.uniform() - 0.5);
    CHECK(sigmoid(-z) == doctest::Approx(1.0 - sigmoid(z)).epsilon(1e-12));
  }
}

TEST_CASE("sigmoid does not underflow to zero at z=-745") {
  const double v = sigmoid(-745.0);
  CHECK(v > 0.0);
  CHECK(v <= 1e-300);
}

TEST_CASE("zero model predicts one half") {
  LinearModel m;
  m.weights = {0, 0};
  m.feature_mean = {0, 0};
  m.feature_sd = {1, 1};
  const double x[2] = {3, -4};
  CHECK(predict_proba_logistic(m, {x, 2}) == 0.5);
}

TEST_CASE("prediction matches the manual dot product") {
  LinearModel m;
  m.weights = {0.5, -1.25};
  m.bias = 0.3;
  m.feature_mean = {1.0, 2.0};
  m.feature_sd = {2.0, 4.0};
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    const double x[2] = {10 * rng.uniform(), 10 * rng.uniform()};
    const double z = 0.5 * (x[0] - 1.0) / 2.0 - 1.25 * (x[1] - 2.0) / 4.0 + 0.3;
    CHECK(predict_proba_logistic(m, {x, 2}) ==
          doctest::Approx(sigmoid(z)).epsilon(1e-12));
  }
}

TEST_CASE("separable 1-D data is fit to training accuracy 1") {
  const Matrix X = make_matrix({{-2}, {-1.5}, {-1}, {1}, {1.5}, {2}});
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const LinearModel m = fit_logistic(X, y, 1e-6);
  for (std::size_t r = 0; r < 6; ++r)
    CHECK((predict_proba_logistic(m, X.row(r)) >= 0.5 ? 1 : 0) == y[r]);
}

TEST_CASE("gradient at convergence matches finite differences") {
  Rng rng(43);
  Matrix X(60, 3);
  std::vector<int> y(60);
  for (std::size_t r = 0; r < 60; ++r) {
    for (std::size_t c = 0; c < 3; ++c) X.at(r, c) = rng.normal();
    y[r] = X.at(r, 0) + rng.normal() > 0 ? 1 : 0;
  }
  const double l2 = 0.01;
  LinearModel m = fit_logistic(X, y, l2, 2000, 1e-9);
  const Matrix Xs = standardize(X, m);

  const auto grad = logistic_gradient(m, Xs, y);
  // converged: tiny gradient
  for (double g : grad) CHECK(std::fabs(g) < 1e-6);

  // independent central finite differences of the loss
  const double eps = 1e-6;
  for (std::size_t j = 0; j <= m.weights.size(); ++j) {
    LinearModel hi = m, lo = m;
    if (j < m.weights.size()) {
      hi.weights[j] += eps;
      lo.weights[j] -= eps;
    } else {
      hi.bias += eps;
      lo.bias -= eps;
    }
    const double fd =
        (logistic_loss(hi, Xs, y) - logistic_loss(lo, Xs, y)) / (2 * eps);
    CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("loss is convex along random segments") {
  Rng rng(44);
  Matrix X(40, 2);
  std::vector<int> y(40);
  for (std::size_t r = 0; r < 40; ++r) {
    X.at(r, 0) = rng.normal();
    X.at(r, 1) = rng.normal();
    y[r] = rng.uniform() < 0.5 ? 1 : 0;
  }
  LinearModel base = fit_logistic(X, y, 0.1, 5);
  const Matrix Xs = standardize(X, base);
  for (int it = 0; it < 20; ++it) {
    LinearModel a = base, b = base;
    for (auto& w : a.weights) w = rng.normal();
    for (auto& w : b.weights) w = rng.normal();
    a.bias = rng.normal();
    b.bias = rng.normal();
    LinearModel mid = a;
    for (std::size_t j = 0; j < mid.weights.size(); ++j)
      mid.weights[j] = (a.weights[j] + b.weights[j]) / 2;
    mid.bias = (a.bias + b.bias) / 2;
    CHECK(logistic_loss(mid, Xs, y) <=
          (logistic_loss(a, Xs, y) + logistic_loss(b, Xs, y)) / 2 + 1e-12);
  }
}

TEST_CASE("standardization invariance of fitted predictions") {
  Rng rng(45);
  Matrix X(80, 2);
  std::vector<int> y(80);
  for (std::size_t r = 0; r < 80; ++r) {
    X.at(r, 0) = 5000 + 300 * rng.normal();  // large-scale feature
    X.at(r, 1) = 0.001 * rng.normal();       // tiny-scale feature
    y[r] = X.at(r, 0) > 5000 ? 1 : 0;
  }
  // affinely rescaled copy of the data
  Matrix X2 = X;
  for (std::size_t r = 0; r < 80; ++r) {
    X2.at(r, 0) = (X.at(r, 0) - 5000) / 300;
    X2.at(r, 1) = X.at(r, 1) * 1000;
  }
  const LinearModel a = fit_logistic(X, y, 1e-4, 3000, 1e-10);
  const LinearModel b = fit_logistic(X2, y, 1e-4, 3000, 1e-10);
  for (std::size_t r = 0; r < 80; ++r)
    CHECK(predict_proba_logistic(a, X.row(r)) ==
          doctest::Approx(predict_proba_logistic(b, X2.row(r))).epsilon(1e-6));
}

TEST_CASE("constant columns get unit scale and cannot produce NaN") {
  Matrix X = make_matrix({{1, 7}, {2, 7}, {3, 7}, {4, 7}});
  const std::vector<int> y{0, 0, 1, 1};
  const LinearModel m = fit_logistic(X, y, 1e-4);
  CHECK(m.feature_sd[1] == 1.0);
  for (std::size_t r = 0; r < 4; ++r)
    CHECK(std::isfinite(predict_proba_logistic(m, X.row(r))));
}

TEST_CASE("non-finite inputs are rejected") {
  Matrix X = make_matrix({{1}, {std::nan("")}});
  CHECK_THROWS_AS(fit_logistic(X, {0, 1}, 1e-4), std::invalid_argument);
}
