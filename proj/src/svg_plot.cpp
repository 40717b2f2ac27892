#include "plasmadiag/svg_plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace plasmadiag::svg {

namespace {

constexpr double kMarginLeft = 78.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 34.0;
constexpr double kMarginBottom = 48.0;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return !(lo <= hi); }
};

bool plottable(double v, Scale scale) { return std::isfinite(v) && (scale == Scale::Linear || v > 0.0); }

double transform(double v, Scale scale) { return scale == Scale::Log ? std::log10(v) : v; }

// Range in transformed coordinates, padded so flat data still has extent.
Range axis_range(const Panel& panel, bool horizontal) {
  const Scale scale = horizontal ? panel.x.scale : panel.y.scale;
  Range r;
  for (const auto& s : panel.series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (!plottable(s.x[k], panel.x.scale) || !plottable(s.y[k], panel.y.scale))
        continue;
      r.add(transform(horizontal ? s.x[k] : s.y[k], scale));
    }
  }
  if (r.empty())
    return {0.0, 1.0};
  if (scale == Scale::Log) {
    r.lo = std::floor(r.lo);
    r.hi = std::ceil(r.hi);
    if (r.hi <= r.lo)
      r.hi = r.lo + 1.0;
    return r;
  }
  const double span = r.hi - r.lo;
  const double scale_ref = std::max(std::abs(r.lo), std::abs(r.hi));
  if (span <= 1e-9 * scale_ref || span == 0.0) {
    const double mid = 0.5 * (r.lo + r.hi);
    const double pad = std::max(0.05 * scale_ref, 1e-12);
    return {mid - pad, mid + pad};
  }
  if (!horizontal) {
    r.lo -= 0.05 * span;
    r.hi += 0.05 * span;
  }
  return r;
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

std::vector<double> ticks(const Range& r, Scale scale) {
  std::vector<double> out;
  if (scale == Scale::Log) {
    const double stride = std::max(1.0, std::ceil((r.hi - r.lo) / 8.0));
    for (double d = r.lo; d <= r.hi + 1e-9; d += stride)
      out.push_back(d);
    return out;
  }
  const double step = nice_step(r.hi - r.lo);
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

std::string tick_label(double t, Scale scale) {
  if (scale == Scale::Log)
    return fmt::format("1e{}", static_cast<int>(std::lround(t)));
  return fmt::format("{:.4g}", t);
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

void render_panel(std::string& out, const Panel& panel, double top, int width, int height) {
  const double plot_w = width - kMarginLeft - kMarginRight;
  const double plot_h = height - kMarginTop - kMarginBottom;
  const double x0 = kMarginLeft;
  const double y0 = top + kMarginTop;
  const Range rx = axis_range(panel, true);
  const Range ry = axis_range(panel, false);

  auto px = [&](double v) { return x0 + (transform(v, panel.x.scale) - rx.lo) / (rx.hi - rx.lo) * plot_w; };
  auto py = [&](double v) { return y0 + plot_h - (transform(v, panel.y.scale) - ry.lo) / (ry.hi - ry.lo) * plot_h; };

  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
                     x0 + plot_w / 2, top + 20.0, escape(panel.title));
  out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                     "stroke=\"#333333\" stroke-width=\"1\"/>\n",
                     x0, y0, plot_w, plot_h);

  for (double t : ticks(rx, panel.x.scale)) {
    const double x = x0 + (t - rx.lo) / (rx.hi - rx.lo) * plot_w;
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#dddddd\" "
                       "stroke-width=\"1\"/>\n",
                       x, y0, y0 + plot_h);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n", x,
                       y0 + plot_h + 16.0, tick_label(t, panel.x.scale));
  }
  for (double t : ticks(ry, panel.y.scale)) {
    const double y = y0 + plot_h - (t - ry.lo) / (ry.hi - ry.lo) * plot_h;
    out += fmt::format("<line x1=\"{1:.2f}\" y1=\"{0:.2f}\" x2=\"{2:.2f}\" y2=\"{0:.2f}\" stroke=\"#dddddd\" "
                       "stroke-width=\"1\"/>\n",
                       y, x0, x0 + plot_w);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", x0 - 6.0,
                       y + 4.0, tick_label(t, panel.y.scale));
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                     x0 + plot_w / 2, y0 + plot_h + 36.0, escape(panel.x.label));
  out += fmt::format("<text x=\"{0:.2f}\" y=\"{1:.2f}\" font-size=\"12\" text-anchor=\"middle\" "
                     "transform=\"rotate(-90 {0:.2f} {1:.2f})\">{2}</text>\n",
                     18.0, y0 + plot_h / 2, escape(panel.y.label));

  double legend_y = y0 + 14.0;
  for (const auto& s : panel.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.style == Series::Style::Line) {
      std::string points;
      for (std::size_t k = 0; k < n; ++k) {
        if (!plottable(s.x[k], panel.x.scale) || !plottable(s.y[k], panel.y.scale))
          continue;
        points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", px(s.x[k]), py(s.y[k]));
      }
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n", s.color,
                         points);
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        if (!plottable(s.x[k], panel.x.scale) || !plottable(s.y[k], panel.y.scale))
          continue;
        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(s.x[k]), py(s.y[k]),
                           s.color);
      }
    }
    if (!s.label.empty()) {
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
                         x0 + plot_w - 150.0, legend_y - 9.0, s.color);
      out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">{}</text>\n", x0 + plot_w - 135.0,
                         legend_y, escape(s.label));
      legend_y += 16.0;
    }
  }
}

} // namespace

std::string render(const std::vector<Panel>& panels, int width, int panel_height) {
  const int height = panel_height * static_cast<int>(std::max<std::size_t>(panels.size(), 1));
  std::string out = fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
                                "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\">\n",
                                width, height);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", width, height);
  for (std::size_t k = 0; k < panels.size(); ++k)
    render_panel(out, panels[k], static_cast<double>(k) * panel_height, width, panel_height);
  out += "</svg>\n";
  return out;
}

} // namespace plasmadiag::svg
