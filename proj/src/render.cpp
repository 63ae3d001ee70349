#include "laylab/render.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace laylab {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Layout& layout, std::span<const BBox> saliency,
                       const RenderStyle& style) {
  if (style.width <= 0 || style.height <= 0) {
    throw std::invalid_argument("render_svg: output dimensions must be positive");
  }
  const double W = style.width, H = style.height;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(style.width) + "\" height=\"" + std::to_string(style.height) +
         "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\">\n";
  svg += "  <defs>\n";
  svg +=
      "    <pattern id=\"hatch\" width=\"8\" height=\"8\" "
      "patternTransform=\"rotate(45)\" patternUnits=\"userSpaceOnUse\">\n";
  svg += "      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"" +
         style.saliency_color + "\" stroke-width=\"3\"/>\n";
  svg += "    </pattern>\n";
  svg += "  </defs>\n";

  for (const BBox& s : saliency) {
    svg += "  <rect x=\"" + fmt(s.x * W) + "\" y=\"" + fmt(s.y * H) + "\" width=\"" +
           fmt(s.w * W) + "\" height=\"" + fmt(s.h * H) +
           "\" fill=\"url(#hatch)\" stroke=\"" + style.saliency_color +
           "\" stroke-width=\"" + fmt(style.stroke_width) + "\"/>\n";
  }

  // Underlays first so texts draw on top of them.
  std::vector<const LayoutElement*> order;
  order.reserve(layout.elements.size());
  for (const LayoutElement& e : layout.elements) {
    if (e.category == ElementCategory::kUnderlay) order.push_back(&e);
  }
  for (const LayoutElement& e : layout.elements) {
    if (e.category != ElementCategory::kUnderlay) order.push_back(&e);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    const bool ua = a->category == ElementCategory::kUnderlay;
    const bool ub = b->category == ElementCategory::kUnderlay;
    if (ua != ub) return ua;
    return a->id < b->id;
  });

  for (const LayoutElement* e : order) {
    const int c = static_cast<int>(e->category);
    svg += "  <rect x=\"" + fmt(e->box.x * W) + "\" y=\"" + fmt(e->box.y * H) +
           "\" width=\"" + fmt(e->box.w * W) + "\" height=\"" + fmt(e->box.h * H) +
           "\" fill=\"" + style.fill[c] + "\" fill-opacity=\"" + fmt(style.opacity[c]) +
           "\" stroke=\"" + style.fill[c] + "\" stroke-width=\"" +
           fmt(style.stroke_width) + "\"/>\n";
    svg += "  <text x=\"" + fmt(e->box.x * W + 4) + "\" y=\"" + fmt(e->box.y * H + 14) +
           "\" font-family=\"monospace\" font-size=\"12\" fill=\"#222222\">" +
           to_string(e->category) + " " + std::to_string(e->id) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace laylab
