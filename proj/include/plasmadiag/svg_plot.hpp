#pragma once

// Self-contained SVG charts (inline styles, no external assets). Output depends
// only on the input data, so identical inputs give identical bytes.

#include <string>
#include <vector>

namespace plasmadiag::svg {

enum class Scale { Linear, Log };

struct Axis {
  std::string label;
  Scale scale = Scale::Linear;
};

struct Series {
  enum class Style { Line, Points };

  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  Style style = Style::Line;
  std::string color = "#1f4e9c";
};

struct Panel {
  std::string title;
  Axis x;
  Axis y;
  std::vector<Series> series;
};

// Panels are stacked vertically. Points that cannot be placed on a log axis
// (<= 0) are skipped.
std::string render(const std::vector<Panel>& panels, int width = 720, int panel_height = 320);

} // namespace plasmadiag::svg
