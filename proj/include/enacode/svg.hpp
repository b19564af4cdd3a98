#pragma once

#include "enacode/ena.hpp"

#include <string>

namespace enacode::svg {

struct Style {
  int size = 480;              // square canvas, pixels
  double max_stroke = 14.0;    // width at |weight| == scale
  double min_stroke = 1.0;     // floor for nonzero edges
  double scale = 0.0;          // <= 0: the graph's largest |weight|
  std::string color_a = "#d62728"; // positive weights
  std::string color_b = "#1f77b4"; // negative weights (difference graphs)
};

/// Standalone SVG; edge width is linear in |weight|. `metadata` is emitted verbatim inside a leading comment.
std::string render_network(const ena::NetworkGraph& graph, const std::string& metadata,
                           const Style& style = {});

} // namespace enacode::svg
