#include "salecast/linear.hpp"

#include <cmath>
#include <stdexcept>

namespace salecast {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix standardize(const Matrix& X, const LinearModel& model) {
  Matrix out(X.rows, X.cols);
  for (std::size_t r = 0; r < X.rows; ++r)
    for (std::size_t c = 0; c < X.cols; ++c)
      out.at(r, c) = (X.at(r, c) - model.feature_mean[c]) / model.feature_sd[c];
  return out;
}

namespace {

// numerically stable -[y log p + (1-y) log(1-p)] with p = sigmoid(z):
// loss(z, y) = log(1 + exp(-|z|)) + max(z, 0) - y*z
double ce_from_logit(double z, int y) {
  return std::log1p(std::exp(-std::fabs(z))) + std::max(z, 0.0) - y * z;
}

double logit_of(const LinearModel& m, const Matrix& X_std, std::size_t r) {
  double z = m.bias;
  for (std::size_t c = 0; c < X_std.cols; ++c)
    z += m.weights[c] * X_std.at(r, c);
  return z;
}

}  // namespace

double logistic_loss(const LinearModel& m, const Matrix& X_std,
                     const std::vector<int>& y) {
  double loss = 0.0;
  for (std::size_t r = 0; r < X_std.rows; ++r)
    loss += ce_from_logit(logit_of(m, X_std, r), y[r]);
  loss /= static_cast<double>(X_std.rows);
  double reg = 0.0;
  for (double w : m.weights) reg += w * w;
  return loss + 0.5 * m.l2 * reg;
}

std::vector<double> logistic_gradient(const LinearModel& m, const Matrix& X_std,
                                      const std::vector<int>& y) {
  std::vector<double> grad(X_std.cols + 1, 0.0);
  for (std::size_t r = 0; r < X_std.rows; ++r) {
    const double resid = sigmoid(logit_of(m, X_std, r)) - y[r];
    for (std::size_t c = 0; c < X_std.cols; ++c)
      grad[c] += resid * X_std.at(r, c);
    grad[X_std.cols] += resid;
  }
  const double inv_n = 1.0 / static_cast<double>(X_std.rows);
  for (auto& g : grad) g *= inv_n;
  for (std::size_t c = 0; c < X_std.cols; ++c) grad[c] += m.l2 * m.weights[c];
  return grad;
}

LinearModel fit_logistic(const Matrix& X, const std::vector<int>& y, double l2,
                         std::size_t max_iters, double tol) {
  if (X.rows == 0) throw std::invalid_argument("empty feature matrix");
  if (y.size() != X.rows) throw std::invalid_argument("label length mismatch");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  for (double v : X.data)
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite feature value");

  LinearModel m;
  m.l2 = l2;
  m.weights.assign(X.cols, 0.0);
  m.feature_mean.assign(X.cols, 0.0);
  m.feature_sd.assign(X.cols, 1.0);
  for (std::size_t c = 0; c < X.cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r) mean += X.at(r, c);
    mean /= static_cast<double>(X.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < X.rows; ++r) {
      const double d = X.at(r, c) - mean;
      var += d * d;
    }
    var /= static_cast<double>(X.rows);
    m.feature_mean[c] = mean;
    if (var > 0.0) m.feature_sd[c] = std::sqrt(var);
  }

  const Matrix Xs = standardize(X, m);
  double loss = logistic_loss(m, Xs, y);
  double step = 1.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const auto grad = logistic_gradient(m, Xs, y);
    double inf_norm = 0.0, sq_norm = 0.0;
    for (double g : grad) {
      inf_norm = std::max(inf_norm, std::fabs(g));
      sq_norm += g * g;
    }
    if (inf_norm < tol) break;

    // backtracking with Armijo condition
    step = std::min(step * 2.0, 1e4);
    for (;;) {
      LinearModel trial = m;
      for (std::size_t c = 0; c < X.cols; ++c)
        trial.weights[c] -= step * grad[c];
      trial.bias -= step * grad[X.cols];
      const double trial_loss = logistic_loss(trial, Xs, y);
      if (trial_loss <= loss - 1e-4 * step * sq_norm) {
        m = std::move(trial);
        loss = trial_loss;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) return m;  // flat within precision
    }
  }
  return m;
}

double predict_proba_logistic(const LinearModel& model,
                              std::span<const double> x) {
  if (x.size() != model.weights.size())
    throw std::invalid_argument("feature dimension mismatch");
  double z = model.bias;
  for (std::size_t c = 0; c < x.size(); ++c)
    z += model.weights[c] * (x[c] - model.feature_mean[c]) / model.feature_sd[c];
  return sigmoid(z);
}

}  // namespace salecast
