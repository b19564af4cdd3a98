#include "enacode/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace enacode::svg {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&':
      out += "&amp;";
      break;
    case '<':
      out += "&lt;";
      break;
    case '>':
      out += "&gt;";
      break;
    case '"':
      out += "&quot;";
      break;
    default:
      out += c;
    }
  }
  return out;
}

// "--" may not appear inside an XML comment
std::string comment_safe(std::string s) {
  for (std::size_t pos; (pos = s.find("--")) != std::string::npos;)
    s.replace(pos, 2, "- -");
  return s;
}

} // namespace

std::string render_network(const ena::NetworkGraph& g, const std::string& metadata, const Style& st) {
  const double margin = 60.0;
  const double inner = st.size - 2 * margin;

  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  for (const auto& n : g.nodes) {
    lo_x = std::min(lo_x, n.x);
    hi_x = std::max(hi_x, n.x);
    lo_y = std::min(lo_y, n.y);
    hi_y = std::max(hi_y, n.y);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
  const double cx = (lo_x + hi_x) / 2, cy = (lo_y + hi_y) / 2;
  auto px = [&](double x) { return st.size / 2.0 + (x - cx) / span * inner; };
  auto py = [&](double y) { return st.size / 2.0 - (y - cy) / span * inner; };

  double scale = st.scale;
  if (scale <= 0)
    for (const auto& e : g.edges)
      scale = std::max(scale, std::abs(e.weight));

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<!-- " + comment_safe(metadata) + " -->\n";
  out += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
                     "viewBox=\"0 0 {0} {0}\">\n",
                     st.size);
  out += fmt::format("<title>{}</title>\n", xml_escape(g.label));
  out += fmt::format("<rect width=\"{0}\" height=\"{0}\" fill=\"#ffffff\"/>\n", st.size);
  out += "<g stroke-linecap=\"round\">\n";
  for (const auto& e : g.edges) {
    if (e.weight == 0.0 || scale <= 0)
      continue;
    const double w = std::max(st.min_stroke, std::abs(e.weight) / scale * st.max_stroke);
    const auto& color = e.weight < 0 ? st.color_b : st.color_a;
    const auto& a = g.nodes[e.a];
    const auto& b = g.nodes[e.b];
    out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                       "stroke-width=\"{:.2f}\" stroke-opacity=\"0.75\"><title>{} - {}: {:.4f}</title>"
                       "</line>\n",
                       px(a.x), py(a.y), px(b.x), py(b.y), color, w, xml_escape(a.code),
                       xml_escape(b.code), e.weight);
  }
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"13\">\n";
  for (const auto& n : g.nodes) {
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"7\" fill=\"#333333\"/>\n", px(n.x),
                       py(n.y));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(n.x),
                       py(n.y) - 12, xml_escape(n.code));
  }
  out += "</g>\n</svg>\n";
  return out;
}

} // namespace enacode::svg
