#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace salecast {

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

struct EvalReport {
  double accuracy = 0, error_rate = 0;
  double precision0 = 0, recall0 = 0, f1_0 = 0;
  double precision1 = 0, recall1 = 0, f1_1 = 0;
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
  std::size_t n = 0;
  bool degenerate_class = false;  // a class absent from both truth and prediction
};

enum class CurveKind { Roc, Ks, Gains, Lift };

struct Curve {
  CurveKind kind;
  std::vector<std::pair<double, double>> points;
  double auc = 0;           // roc
  double ks_value = 0;      // ks
  double ks_threshold = 0;  // ks
  int positive_class = 1;   // gains/lift
  // ks carries both class curves stacked: points holds the TPR series and
  // points2 the FPR series over the same threshold axis
  std::vector<std::pair<double, double>> points2;
};

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred);

EvalReport report(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Threshold sweep over distinct scores descending; AUC by trapezoid rule.
Curve roc_curve(const std::vector<double>& scores, const std::vector<int>& y_true);

// max over thresholds t of |TPR(t) - FPR(t)|, positive iff score >= t.
// Reports the lowest threshold achieving the max.
std::pair<double, double> ks_statistic(const std::vector<double>& scores,
                                       const std::vector<int>& y_true);

// Full K-S curve (both class CDF sweeps) for plotting.
Curve ks_curve(const std::vector<double>& scores, const std::vector<int>& y_true);

Curve cumulative_gains(const std::vector<double>& scores,
                       const std::vector<int>& y_true, int positive_class);

Curve lift_curve(const std::vector<double>& scores,
                 const std::vector<int>& y_true, int positive_class);

std::string curve_kind_name(CurveKind kind);
void write_curve_csv(const Curve& curve, const std::string& path);

}  // namespace salecast
