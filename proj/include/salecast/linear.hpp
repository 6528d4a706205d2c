#pragma once

#include <cstdint>
#include <vector>

#include "salecast/matrix.hpp"

namespace salecast {

double sigmoid(double z);

struct LinearModel {
  std::vector<double> weights;  // over standardized features
  double bias = 0.0;
  double l2 = 0.0;
  std::vector<double> feature_mean;
  std::vector<double> feature_sd;  // 1.0 for constant columns
};

// Mean cross-entropy + (l2/2)*||w||^2 over standardized features; the
// intercept is never regularized.
double logistic_loss(const LinearModel& m, const Matrix& X_std,
                     const std::vector<int>& y);

// Gradient of the above in (w, b); last entry is the bias component.
std::vector<double> logistic_gradient(const LinearModel& m, const Matrix& X_std,
                                      const std::vector<int>& y);

// Full-batch gradient descent with backtracking line search. Stops when the
// gradient infinity norm drops below tol or at max_iters.
LinearModel fit_logistic(const Matrix& X, const std::vector<int>& y, double l2,
                         std::size_t max_iters = 500, double tol = 1e-6);

double predict_proba_logistic(const LinearModel& model, std::span<const double> x);

Matrix standardize(const Matrix& X, const LinearModel& model);

}  // namespace salecast
