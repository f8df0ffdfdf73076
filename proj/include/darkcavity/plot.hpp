#pragma once

// Self-contained SVG emitters for the artifact figures: scan heat map with
// analytic-curve overlay, line plots, bar charts and count histograms.
// Plots are derived views of data already written to CSV; they never carry
// information of their own.  Output is deterministic (fixed formatting, no
// timestamps) so emitted files are rerun-stable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "darkcavity/csv.hpp"
#include "darkcavity/scan.hpp"
#include "darkcavity/types.hpp"

namespace darkcavity {
namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Linear map from data to pixel coordinates.
struct AxisMap {
  double lo = 0, hi = 1;
  double px_lo = 0, px_hi = 1;
  double operator()(double v) const {
    const double t = (v - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
};

inline std::string rgb(double r, double g, double b) {
  char buf[8];
  auto ch = [](double x) {
    return std::clamp(int(std::lround(255.0 * x)), 0, 255);
  };
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", ch(r), ch(g), ch(b));
  return buf;
}

// Five-stop perceptual color ramp, t in [0,1].
inline std::string colormap(double t) {
  static const double stops[5][3] = {{0.267, 0.005, 0.329},
                                     {0.229, 0.322, 0.545},
                                     {0.127, 0.566, 0.551},
                                     {0.369, 0.789, 0.383},
                                     {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(int(t), 3);
  const double f = t - k;
  return rgb(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]),
             stops[k][1] + f * (stops[k + 1][1] - stops[k][1]),
             stops[k][2] + f * (stops[k + 1][2] - stops[k][2]));
}

struct Frame {
  double width = 820, height = 620;
  double left = 80, right = 60, top = 50, bottom = 70;
  std::string body;

  void text(double x, double y, const std::string& s, int size = 14,
            const std::string& anchor = "middle", double rotate = 0) {
    body += "<text x=\"" + num(x) + "\" y=\"" + num(y) +
            "\" font-family=\"sans-serif\" font-size=\"" +
            std::to_string(size) + "\" text-anchor=\"" + anchor + "\"";
    if (rotate != 0)
      body += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " +
              num(y) + ")\"";
    body += ">" + s + "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2,
            const std::string& color, double width_px = 1) {
    body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
            num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" + color +
            "\" stroke-width=\"" + num(width_px) + "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
            num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& color, double width_px = 1.5) {
    body += "<polyline fill=\"none\" stroke=\"" + color +
            "\" stroke-width=\"" + num(width_px) + "\" points=\"";
    for (const auto& [x, y] : pts) body += num(x) + "," + num(y) + " ";
    body += "\"/>\n";
  }

  AxisMap x_map(double lo, double hi) const {
    return {lo, hi, left, width - right};
  }
  AxisMap y_map(double lo, double hi) const {
    return {lo, hi, height - bottom, top};  // y grows upward
  }

  void axes(const AxisMap& xm, const AxisMap& ym, const std::string& xlabel,
            const std::string& ylabel, const std::string& title) {
    const std::string black = "#000000";
    line(left, top, left, height - bottom, black);
    line(left, height - bottom, width - right, height - bottom, black);
    for (int k = 0; k <= 4; ++k) {
      const double tx = xm.lo + (xm.hi - xm.lo) * k / 4.0;
      const double ty = ym.lo + (ym.hi - ym.lo) * k / 4.0;
      line(xm(tx), height - bottom, xm(tx), height - bottom + 5, black);
      text(xm(tx), height - bottom + 20, num(tx), 12);
      line(left - 5, ym(ty), left, ym(ty), black);
      text(left - 8, ym(ty) + 4, num(ty), 12, "end");
    }
    text((left + width - right) / 2, height - bottom + 45, xlabel);
    text(20, (top + height - bottom) / 2, ylabel, 14, "middle", -90);
    text((left + width - right) / 2, top - 15, title, 16);
  }

  std::string finish() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\""
           "http://www.w3.org/2000/svg\" width=\"" +
           num(width) + "\" height=\"" + num(height) +
           "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n" +
           body + "</svg>\n";
  }
};

}  // namespace svg

// 2D scan heat map (axis 0 horizontal, axis 1 vertical), optionally with
// eigenenergy overlay curves.  Values are shown on a log scale floored at
// 1e-6 of the maximum; the data itself stays linear in the CSVs.
inline std::string render_heatmap_svg(const ScanResult& result,
                                      const EigenCurves* overlay = nullptr,
                                      bool log_scale = true,
                                      double log_floor_rel = 1e-6) {
  if (result.shape.size() != 2)
    throw DimensionError("render_heatmap_svg: need a 2D scan");
  const auto& gx = result.spec.axes[0].grid;
  const auto& gy = result.spec.axes[1].grid;
  const int n0 = result.shape[0], n1 = result.shape[1];

  double vmax = 0;
  for (const auto& p : result.points)
    if (p.converged && std::isfinite(p.value)) vmax = std::max(vmax, p.value);
  if (vmax <= 0) vmax = 1;
  const double vfloor = log_floor_rel * vmax;

  svg::Frame f;
  const double x_lo = std::min(gx.front(), gx.back());
  const double x_hi = std::max(gx.front(), gx.back());
  const double y_lo = std::min(gy.front(), gy.back());
  const double y_hi = std::max(gy.front(), gy.back());
  const auto xm = f.x_map(x_lo, x_hi);
  const auto ym = f.y_map(y_lo, y_hi);

  const double dx = (xm.px_hi - xm.px_lo) / n0;
  const double dy = (ym.px_lo - ym.px_hi) / n1;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const ScanPoint& p = result.at(i, j);
      std::string fill = "#c0c0c0";  // failed points: neutral grey
      if (p.converged && std::isfinite(p.value)) {
        double t;
        if (log_scale) {
          const double v = std::max(p.value, vfloor);
          t = std::log10(v / vfloor) / std::log10(vmax / vfloor);
        } else {
          t = p.value / vmax;
        }
        fill = svg::colormap(t);
      }
      const double px = xm(gx[std::size_t(i)]) - dx / 2;
      const double py = ym(gy[std::size_t(j)]) - dy / 2;
      f.rect(px, py, dx + 0.5, dy + 0.5, fill);
    }
  }

  if (overlay) {
    for (const auto& branch : overlay->delta12) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < overlay->delta23.size(); ++k) {
        const double bx = branch[k], by = overlay->delta23[k];
        if (bx >= x_lo && bx <= x_hi && by >= y_lo && by <= y_hi)
          pts.push_back({xm(bx), ym(by)});
        else if (!pts.empty()) {
          f.polyline(pts, "#4da6ff");
          pts.clear();
        }
      }
      if (!pts.empty()) f.polyline(pts, "#4da6ff");
    }
  }

  f.axes(xm, ym, result.spec.axes[0].parameter + " (rad/us)",
         result.spec.axes[1].parameter + " (rad/us)",
         std::string(to_string(result.spec.observable)) +
             (log_scale ? " (log color scale)" : ""));
  return f.finish();
}

inline std::string render_line_svg(
    const std::vector<double>& x,
    const std::vector<std::vector<double>>& series,
    const std::vector<std::string>& labels, const std::string& title,
    const std::string& xlabel, const std::string& ylabel) {
  if (x.empty() || series.empty())
    throw DimensionError("render_line_svg: empty data");
  double y_lo = 0, y_hi = -1e300;
  for (const auto& s : series) {
    if (s.size() != x.size())
      throw DimensionError("render_line_svg: series length mismatch");
    for (double v : s)
      if (std::isfinite(v)) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
      }
  }
  if (y_hi <= y_lo) y_hi = y_lo + 1;

  svg::Frame f;
  const auto xm = f.x_map(x.front(), x.back());
  const auto ym = f.y_map(y_lo, 1.05 * y_hi);
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (std::isfinite(series[s][k]))
        pts.push_back({xm(x[k]), ym(series[s][k])});
    f.polyline(pts, palette[s % 4]);
    if (s < labels.size())
      f.text(f.width - f.right - 10, f.top + 18 * double(s + 1), labels[s],
             12, "end");
  }
  f.axes(xm, ym, xlabel, ylabel, title);
  return f.finish();
}

// Bar chart over integer-labeled categories; log-scale bars when the values
// span more than two decades (useful for suppression factors).
inline std::string render_bar_svg(const std::vector<std::string>& labels,
                                  const std::vector<double>& values,
                                  const std::string& title,
                                  const std::string& ylabel) {
  if (labels.size() != values.size() || values.empty())
    throw DimensionError("render_bar_svg: label/value mismatch");
  double vmax = 0, vmin_pos = 1e300;
  for (double v : values) {
    vmax = std::max(vmax, v);
    if (v > 0) vmin_pos = std::min(vmin_pos, v);
  }
  if (vmax <= 0) vmax = 1;
  const bool logy = vmin_pos < 1e299 && vmax / vmin_pos > 100;
  const double floor_v = logy ? vmin_pos / 10 : 0;

  svg::Frame f;
  const double span = f.width - f.left - f.right;
  const double w = span / double(values.size());
  const double base = f.height - f.bottom;
  const double hmax = base - f.top;
  for (std::size_t k = 0; k < values.size(); ++k) {
    double t = 0;
    if (values[k] > 0)
      t = logy ? std::log10(values[k] / floor_v) / std::log10(vmax / floor_v)
               : values[k] / vmax;
    const double h = hmax * std::clamp(t, 0.0, 1.0);
    f.rect(f.left + double(k) * w + 0.15 * w, base - h, 0.7 * w, h,
           "#1f77b4");
    f.text(f.left + (double(k) + 0.5) * w, base + 20, labels[k], 12);
    f.text(f.left + (double(k) + 0.5) * w, base - h - 6, svg::num(values[k]),
           11);
  }
  f.line(f.left, base, f.width - f.right, base, "#000000");
  f.text((f.left + f.width - f.right) / 2, f.top - 15, title, 16);
  f.text(20, (f.top + base) / 2, ylabel + (logy ? " (log bars)" : ""), 14,
         "middle", -90);
  return f.finish();
}

inline std::string render_histogram_svg(const std::map<int, int>& hist,
                                        const std::string& title,
                                        const std::string& xlabel) {
  if (hist.empty()) throw DimensionError("render_histogram_svg: empty");
  const int lo = hist.begin()->first, hi = hist.rbegin()->first;
  std::vector<std::string> labels;
  std::vector<double> values;
  for (int k = lo; k <= hi; ++k) {
    labels.push_back(std::to_string(k));
    const auto it = hist.find(k);
    values.push_back(it == hist.end() ? 0.0 : double(it->second));
  }
  std::string s = render_bar_svg(labels, values, title, "trajectories");
  // xlabel rides on the title line of render_bar_svg; append axis text.
  const std::string marker = "</svg>\n";
  s.insert(s.size() - marker.size(),
           "<text x=\"410\" y=\"600\" font-family=\"sans-serif\" "
           "font-size=\"14\" text-anchor=\"middle\">" +
               xlabel + "</text>\n");
  return s;
}

}  // namespace darkcavity
