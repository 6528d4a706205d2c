#include "salecast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace salecast {

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 70, kRight = 30, kTop = 50, kBottom = 60;

struct Axis {
  double min_x, max_x, min_y, max_y;
  double px(double x) const {
    return kLeft + (x - min_x) / (max_x - min_x) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom -
           (y - min_y) / (max_y - min_y) * (kHeight - kTop - kBottom);
  }
};

void svg_header(std::ostream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth
      << " " << kHeight << "\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2
      << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
         "font-family=\"sans-serif\">"
      << title << "</text>\n";
}

void axes(std::ostream& out, const Axis& a, const std::string& x_label,
          const std::string& y_label) {
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom
      << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = a.min_x + (a.max_x - a.min_x) * i / 5.0;
    const double fy = a.min_y + (a.max_y - a.min_y) * i / 5.0;
    out << "<text x=\"" << a.px(fx) << "\" y=\"" << kHeight - kBottom + 20
        << "\" text-anchor=\"middle\" font-size=\"11\" "
           "font-family=\"sans-serif\">"
        << std::round(fx * 100) / 100 << "</text>\n"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << a.py(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\" "
           "font-family=\"sans-serif\">"
        << std::round(fy * 100) / 100 << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
      << kHeight - 15
      << "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">"
      << x_label << "</text>\n"
      << "<text x=\"20\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 20 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << y_label << "</text>\n";
}

void polyline(std::ostream& out, const Axis& a,
              const std::vector<std::pair<double, double>>& pts,
              const std::string& color) {
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"";
  for (const auto& [x, y] : pts) out << a.px(x) << "," << a.py(y) << " ";
  out << "\"/>\n";
}

}  // namespace

void write_curve_svg(const Curve& curve, const std::string& title,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(6);

  Axis a{0, 1, 0, 1};
  std::string x_label = "x", y_label = "y";
  switch (curve.kind) {
    case CurveKind::Roc:
      x_label = "false positive rate";
      y_label = "true positive rate";
      break;
    case CurveKind::Ks: {
      x_label = "threshold";
      y_label = "fraction below threshold";
      double lo = curve.points.front().first, hi = curve.points.back().first;
      if (lo == hi) hi = lo + 1;
      a = {lo, hi, 0, 1};
      break;
    }
    case CurveKind::Gains:
      x_label = "fraction of sample";
      y_label = "fraction of positives captured";
      break;
    case CurveKind::Lift: {
      x_label = "decile";
      y_label = "lift";
      double top = 1.0;
      for (const auto& [x, y] : curve.points) top = std::max(top, y);
      a = {0, 1, 0, top * 1.05};
      break;
    }
  }

  svg_header(out, title);
  axes(out, a, x_label, y_label);
  if (curve.kind == CurveKind::Gains) {
    polyline(out, a, {{0, 0}, {1, 1}}, "#999999");  // baseline
  } else if (curve.kind == CurveKind::Lift) {
    polyline(out, a, {{0, 1}, {1, 1}}, "#999999");
  } else if (curve.kind == CurveKind::Roc) {
    polyline(out, a, {{0, 0}, {1, 1}}, "#999999");
  }
  polyline(out, a, curve.points, "#1f77b4");
  if (curve.kind == CurveKind::Ks) polyline(out, a, curve.points2, "#d62728");
  out << "</svg>\n";
}

void write_bar_svg(const std::vector<std::pair<std::string, double>>& bars,
                   const std::string& title, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(6);

  double top = 0.0;
  for (const auto& [_, v] : bars) top = std::max(top, v);
  if (top == 0.0) top = 1.0;
  Axis a{0, static_cast<double>(bars.size()), 0, top * 1.1};

  svg_header(out, title);
  axes(out, a, "", "importance");
  const double bw = (kWidth - kLeft - kRight) / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = kLeft + bw * static_cast<double>(i);
    const double y = a.py(bars[i].second);
    out << "<rect x=\"" << x + bw * 0.1 << "\" y=\"" << y << "\" width=\""
        << bw * 0.8 << "\" height=\"" << (kHeight - kBottom) - y
        << "\" fill=\"#1f77b4\"/>\n"
        << "<text x=\"" << x + bw / 2 << "\" y=\"" << kHeight - kBottom + 14
        << "\" text-anchor=\"end\" font-size=\"10\" "
           "font-family=\"sans-serif\" transform=\"rotate(-45 " << x + bw / 2
        << " " << kHeight - kBottom + 14 << ")\">" << bars[i].first
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace salecast
