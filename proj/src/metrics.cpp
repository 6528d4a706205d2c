#include "salecast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace salecast {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("length mismatch");
  if (a == 0) throw std::invalid_argument("empty input");
}

void check_both_classes(const std::vector<int>& y) {
  const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
  const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
  if (!has0 || !has1)
    throw std::invalid_argument("both classes must be present");
}

// indices sorted by score descending, original order as tiebreak
std::vector<std::size_t> order_desc(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return idx;
}

}  // namespace

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  ConfusionMatrix m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1)
      y_pred[i] == 1 ? ++m.tp : ++m.fn;
    else
      y_pred[i] == 1 ? ++m.fp : ++m.tn;
  }
  return m;
}

EvalReport report(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  const ConfusionMatrix m = confusion(y_true, y_pred);
  EvalReport r;
  r.n = m.total();
  r.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(r.n);
  r.error_rate = 1.0 - r.accuracy;

  auto prf = [&](std::size_t tp, std::size_t fp, std::size_t fn, double& p,
                 double& rec, double& f1) {
    if (tp + fp + fn == 0) r.degenerate_class = true;
    p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    rec = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    f1 = p + rec > 0 ? 2 * p * rec / (p + rec) : 0.0;
  };
  prf(m.tp, m.fp, m.fn, r.precision1, r.recall1, r.f1_1);
  prf(m.tn, m.fn, m.fp, r.precision0, r.recall0, r.f1_0);
  r.macro_precision = 0.5 * (r.precision0 + r.precision1);
  r.macro_recall = 0.5 * (r.recall0 + r.recall1);
  r.macro_f1 = 0.5 * (r.f1_0 + r.f1_1);
  return r;
}

Curve roc_curve(const std::vector<double>& scores, const std::vector<int>& y_true) {
  check_lengths(scores.size(), y_true.size());
  check_both_classes(y_true);
  const auto idx = order_desc(scores);
  const double P = static_cast<double>(std::count(y_true.begin(), y_true.end(), 1));
  const double N = static_cast<double>(y_true.size()) - P;

  Curve c;
  c.kind = CurveKind::Roc;
  c.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  double auc = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    // tied scores advance in one sweep step
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      y_true[idx[j]] == 1 ? ++tp : ++fp;
      ++j;
    }
    const auto& prev = c.points.back();
    const double x = fp / N, y = tp / P;
    auc += (x - prev.first) * (y + prev.second) * 0.5;
    c.points.emplace_back(x, y);
    i = j;
  }
  c.auc = auc;
  return c;
}

std::pair<double, double> ks_statistic(const std::vector<double>& scores,
                                       const std::vector<int>& y_true) {
  check_lengths(scores.size(), y_true.size());
  check_both_classes(y_true);
  const auto idx = order_desc(scores);
  const double P = static_cast<double>(std::count(y_true.begin(), y_true.end(), 1));
  const double N = static_cast<double>(y_true.size()) - P;

  double best = 0.0, best_t = scores[idx[0]];
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < idx.size()) {
    const double t = scores[idx[i]];
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == t) {
      y_true[idx[j]] == 1 ? ++tp : ++fp;
      ++j;
    }
    const double gap = std::fabs(tp / P - fp / N);
    // lowest threshold wins ties, and thresholds decrease as we sweep
    if (gap >= best) {
      best = gap;
      best_t = t;
    }
    i = j;
  }
  return {best, best_t};
}

Curve ks_curve(const std::vector<double>& scores, const std::vector<int>& y_true) {
  check_lengths(scores.size(), y_true.size());
  check_both_classes(y_true);
  Curve c;
  c.kind = CurveKind::Ks;
  auto [ks, t] = ks_statistic(scores, y_true);
  c.ks_value = ks;
  c.ks_threshold = t;

  // empirical CDFs of scores per class over ascending thresholds
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const double P = static_cast<double>(std::count(y_true.begin(), y_true.end(), 1));
  const double N = static_cast<double>(y_true.size()) - P;
  for (double thr : sorted) {
    std::size_t below1 = 0, below0 = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] <= thr) y_true[i] == 1 ? ++below1 : ++below0;
    }
    c.points.emplace_back(thr, below1 / P);
    c.points2.emplace_back(thr, below0 / N);
  }
  return c;
}

Curve cumulative_gains(const std::vector<double>& scores,
                       const std::vector<int>& y_true, int positive_class) {
  check_lengths(scores.size(), y_true.size());
  check_both_classes(y_true);
  const auto idx = order_desc(scores);
  const std::size_t n = y_true.size();
  double P = 0;
  for (int y : y_true) P += (y == positive_class);

  Curve c;
  c.kind = CurveKind::Gains;
  c.positive_class = positive_class;
  c.points.emplace_back(0.0, 0.0);
  double captured = 0;
  for (std::size_t i = 0; i < n; ++i) {
    captured += (y_true[idx[i]] == positive_class);
    c.points.emplace_back(static_cast<double>(i + 1) / static_cast<double>(n),
                          captured / P);
  }
  return c;
}

Curve lift_curve(const std::vector<double>& scores,
                 const std::vector<int>& y_true, int positive_class) {
  const Curve gains = cumulative_gains(scores, y_true, positive_class);
  const std::size_t n = y_true.size();
  Curve c;
  c.kind = CurveKind::Lift;
  c.positive_class = positive_class;
  for (int d = 1; d <= 10; ++d) {
    const double q = d / 10.0;
    const std::size_t m = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(n) - 1e-9));
    c.points.emplace_back(q, gains.points[m].second / q);
  }
  return c;
}

std::string curve_kind_name(CurveKind kind) {
  switch (kind) {
    case CurveKind::Roc: return "roc";
    case CurveKind::Ks: return "ks";
    case CurveKind::Gains: return "gains";
    case CurveKind::Lift: return "lift";
  }
  return "?";
}

void write_curve_csv(const Curve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << curve_kind_name(curve.kind) << "_x," << curve_kind_name(curve.kind)
      << "_y";
  if (curve.kind == CurveKind::Ks) out << ",y_class0";
  out << "\n";
  out.precision(12);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    out << curve.points[i].first << "," << curve.points[i].second;
    if (curve.kind == CurveKind::Ks) out << "," << curve.points2[i].second;
    out << "\n";
  }
}

}  // namespace salecast
