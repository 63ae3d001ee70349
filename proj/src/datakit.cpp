#include "laylab/datakit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "laylab/rng.hpp"

namespace laylab {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json pixel_box_json(const PixelBox& b) {
  return ordered_json::array({b.x, b.y, b.w, b.h});
}

PixelBox pixel_box_from(const ordered_json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("bbox_px must be [x,y,w,h]");
  PixelBox b;
  b.x = j.at(0).get<double>();
  b.y = j.at(1).get<double>();
  b.w = j.at(2).get<double>();
  b.h = j.at(3).get<double>();
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
    throw std::invalid_argument("bbox_px must be finite");
  }
  return b;
}

void check_pixel_box(const PixelBox& b, int w, int h, const char* what) {
  const double eps = 1e-6;
  if (b.w <= 0.0 || b.h <= 0.0) {
    throw std::invalid_argument(std::string(what) + " has non-positive size");
  }
  if (b.x < 0.0 || b.y < 0.0 || b.x + b.w > w + eps || b.y + b.h > h + eps) {
    throw std::invalid_argument(std::string(what) + " exceeds canvas");
  }
}

}  // namespace

std::string annotation_to_json(const AnnotationRecord& rec) {
  ordered_json j;
  j["id"] = rec.id;
  j["canvas"]["width"] = rec.canvas_width;
  j["canvas"]["height"] = rec.canvas_height;
  j["split"] = rec.split;
  j["elements"] = ordered_json::array();
  for (const AnnotationElement& e : rec.elements) {
    ordered_json je;
    je["category"] = to_string(e.category);
    je["bbox_px"] = pixel_box_json(e.bbox_px);
    j["elements"].push_back(std::move(je));
  }
  j["saliency"] = ordered_json::array();
  for (const PixelBox& s : rec.saliency) {
    ordered_json js;
    js["bbox_px"] = pixel_box_json(s);
    j["saliency"].push_back(std::move(js));
  }
  return j.dump();
}

AnnotationRecord annotation_from_json(const std::string& line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("not valid JSON: ") + e.what());
  }
  AnnotationRecord rec;
  rec.id = j.at("id").get<std::string>();
  rec.canvas_width = j.at("canvas").at("width").get<int>();
  rec.canvas_height = j.at("canvas").at("height").get<int>();
  rec.split = j.at("split").get<std::string>();
  if (rec.canvas_width <= 0 || rec.canvas_height <= 0) {
    throw std::invalid_argument("canvas dimensions must be positive");
  }
  if (rec.split != "train" && rec.split != "test") {
    throw std::invalid_argument("split must be train or test");
  }
  if (!j.at("elements").is_array() || j.at("elements").empty()) {
    throw std::invalid_argument("elements must be a non-empty array");
  }
  for (const auto& je : j.at("elements")) {
    AnnotationElement e;
    const auto cat = category_from_string(je.at("category").get<std::string>());
    if (!cat) throw std::invalid_argument("unknown category");
    e.category = *cat;
    e.bbox_px = pixel_box_from(je.at("bbox_px"));
    check_pixel_box(e.bbox_px, rec.canvas_width, rec.canvas_height, "element box");
    rec.elements.push_back(e);
  }
  if (j.contains("saliency")) {
    for (const auto& js : j.at("saliency")) {
      const PixelBox b = pixel_box_from(js.at("bbox_px"));
      check_pixel_box(b, rec.canvas_width, rec.canvas_height, "saliency box");
      rec.saliency.push_back(b);
    }
  }
  return rec;
}

LoadResult load_annotations(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  LoadResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.records.push_back(annotation_from_json(line));
    } catch (const std::exception& e) {
      const std::string msg = "line " + std::to_string(line_no) + ": " + e.what();
      if (options.strict) throw std::runtime_error(path + ": " + msg);
      result.warnings.push_back(msg);
    }
  }
  if (result.records.empty()) {
    throw std::runtime_error(path + ": no valid annotation records");
  }
  return result;
}

void write_annotations(const std::string& path, std::span<const AnnotationRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const AnnotationRecord& rec : records) {
    out << annotation_to_json(rec) << '\n';
  }
}

std::pair<CanvasSpec, Layout> to_canvas_spec(const AnnotationRecord& rec) {
  CanvasSpec spec;
  spec.canvas_width = rec.canvas_width;
  spec.canvas_height = rec.canvas_height;
  Layout reference;
  const double w = rec.canvas_width, h = rec.canvas_height;
  for (size_t i = 0; i < rec.elements.size(); ++i) {
    const AnnotationElement& e = rec.elements[i];
    spec.elements.push_back(ElementSpec{static_cast<int>(i), e.category, std::nullopt});
    reference.elements.push_back(
        LayoutElement{static_cast<int>(i), e.category,
                      make_bbox(e.bbox_px.x / w, e.bbox_px.y / h, e.bbox_px.w / w,
                                e.bbox_px.h / h)});
  }
  for (const PixelBox& s : rec.saliency) {
    spec.saliency.push_back(make_bbox(s.x / w, s.y / h, s.w / w, s.h / h));
  }
  return {std::move(spec), std::move(reference)};
}

AnnotationRecord to_annotation(const CanvasSpec& spec, const Layout& reference,
                               const std::string& id, const std::string& split) {
  AnnotationRecord rec;
  rec.id = id;
  rec.canvas_width = spec.canvas_width;
  rec.canvas_height = spec.canvas_height;
  rec.split = split;
  const double w = spec.canvas_width, h = spec.canvas_height;
  for (const LayoutElement& e : reference.elements) {
    rec.elements.push_back(AnnotationElement{
        e.category, PixelBox{e.box.x * w, e.box.y * h, e.box.w * w, e.box.h * h}});
  }
  for (const BBox& s : spec.saliency) {
    rec.saliency.push_back(PixelBox{s.x * w, s.y * h, s.w * w, s.h * h});
  }
  return rec;
}

namespace {

ElementCategory random_plain_category(Rng& rng, bool allow_embellishment) {
  const double u = rng.uniform();
  if (allow_embellishment) {
    if (u < 0.60) return ElementCategory::kText;
    if (u < 0.85) return ElementCategory::kLogo;
    return ElementCategory::kEmbellishment;
  }
  return u < 0.70 ? ElementCategory::kText : ElementCategory::kLogo;
}

SynthCanvas make_random_canvas(const SynthConfig& cfg, Rng& rng) {
  SynthCanvas canvas;
  canvas.spec.canvas_width = cfg.canvas_width;
  canvas.spec.canvas_height = cfg.canvas_height;
  const int n = rng.uniform_int(cfg.min_elements, cfg.max_elements);
  Layout layout;
  for (int i = 0; i < n; ++i) {
    ElementCategory cat = rng.uniform() < cfg.underlay_prob
                              ? ElementCategory::kUnderlay
                              : random_plain_category(rng, cfg.allow_embellishment);
    const double w = 0.05 + 0.45 * rng.uniform();
    const double h = 0.05 + 0.45 * rng.uniform();
    const double x = rng.uniform() * (1.0 - w);
    const double y = rng.uniform() * (1.0 - h);
    canvas.spec.elements.push_back(ElementSpec{i, cat, std::nullopt});
    layout.elements.push_back(LayoutElement{i, cat, BBox{x, y, w, h}});
  }
  const int saliency_count = rng.uniform_int(cfg.min_saliency, cfg.max_saliency);
  for (int s = 0; s < saliency_count; ++s) {
    const double w = 0.1 + 0.3 * rng.uniform();
    const double h = 0.1 + 0.3 * rng.uniform();
    const double x = rng.uniform() * (1.0 - w);
    const double y = rng.uniform() * (1.0 - h);
    canvas.spec.saliency.push_back(BBox{x, y, w, h});
  }
  canvas.reference = std::move(layout);
  return canvas;
}

// Designed layouts place plain elements in a left column and underlay-backed
// texts in a right column, all centers on one uniform vertical rhythm.
// Saliency sits in a strip that no element column touches.
SynthCanvas make_designed_canvas(const SynthConfig& cfg, Rng& rng) {
  constexpr double kPairTextHeight = 0.04;
  constexpr double kUnderlayMargin = 0.015;
  constexpr double kPlainCenterX = 0.495;

  SynthCanvas canvas;
  canvas.spec.canvas_width = cfg.canvas_width;
  canvas.spec.canvas_height = cfg.canvas_height;

  const int n = rng.uniform_int(std::max(1, cfg.min_elements), cfg.max_elements);

  // Row plan: a pair spans two adjacent rows (text above, underlay center
  // below); pairs are separated by at least one plain row so underlays never
  // graze a neighboring pair's text.
  struct Item {
    bool is_pair = false;
  };
  std::vector<Item> items;
  int remaining = n;
  bool prev_pair = false;
  bool have_pair = false;
  while (remaining > 0) {
    const bool can_pair = remaining >= 2 && !prev_pair;
    const bool must_pair = can_pair && !have_pair && remaining == 2;
    const bool take_pair = can_pair && (must_pair || rng.uniform() < cfg.underlay_prob);
    items.push_back({take_pair});
    prev_pair = take_pair;
    have_pair = have_pair || take_pair;
    remaining -= take_pair ? 2 : 1;
  }

  const int rows = n;
  const double step = rows > 1 ? std::min(0.6 / (rows - 1), 0.16) : 0.0;
  const double y0 = 0.5 - (rows - 1) * step / 2.0;

  Layout layout;
  int row = 0;
  int id = 0;
  for (const Item& item : items) {
    if (item.is_pair) {
      const double text_cy = y0 + row * step;
      const double underlay_cy = y0 + (row + 1) * step;
      const double underlay_w = 0.30 + 0.03 * rng.uniform();
      const double underlay_x = 0.645 + (0.33 - underlay_w) * rng.uniform();
      const double text_w = underlay_w - 0.05;
      const double text_x = underlay_x + (underlay_w - text_w) / 2.0;
      const double underlay_half = step + kPairTextHeight / 2.0 + kUnderlayMargin;

      canvas.spec.elements.push_back(ElementSpec{id, ElementCategory::kText, std::nullopt});
      layout.elements.push_back(LayoutElement{
          id, ElementCategory::kText,
          BBox{text_x, text_cy - kPairTextHeight / 2.0, text_w, kPairTextHeight}});
      ++id;
      canvas.spec.elements.push_back(ElementSpec{id, ElementCategory::kUnderlay, std::nullopt});
      layout.elements.push_back(LayoutElement{
          id, ElementCategory::kUnderlay,
          BBox{underlay_x, underlay_cy - underlay_half, underlay_w, 2.0 * underlay_half}});
      ++id;
      row += 2;
    } else {
      const double cy = y0 + row * step;
      const double w = 0.12 + 0.14 * rng.uniform();
      const double max_h = rows > 1 ? std::min(0.06, 0.7 * step) : 0.06;
      const double h = 0.03 + (max_h - 0.03) * rng.uniform();
      const ElementCategory cat = random_plain_category(rng, cfg.allow_embellishment);
      canvas.spec.elements.push_back(ElementSpec{id, cat, std::nullopt});
      layout.elements.push_back(
          LayoutElement{id, cat, BBox{kPlainCenterX - w / 2.0, cy - h / 2.0, w, h}});
      ++id;
      row += 1;
    }
  }

  const int saliency_count = rng.uniform_int(cfg.min_saliency, cfg.max_saliency);
  for (int s = 0; s < saliency_count; ++s) {
    const double w = 0.08 + 0.12 * rng.uniform();
    const double h = 0.1 + 0.2 * rng.uniform();
    const double x = 0.02 + (0.33 - 0.02 - w) * rng.uniform();
    const double y = 0.05 + (0.9 - h) * rng.uniform();
    canvas.spec.saliency.push_back(BBox{x, y, w, h});
  }

  canvas.reference = std::move(layout);
  return canvas;
}

}  // namespace

std::vector<SynthCanvas> generate_synthetic(const SynthConfig& cfg, int count) {
  if (cfg.min_elements < 1 || cfg.max_elements < cfg.min_elements) {
    throw std::invalid_argument("generate_synthetic: bad element count range");
  }
  if (cfg.min_saliency < 0 || cfg.max_saliency < cfg.min_saliency) {
    throw std::invalid_argument("generate_synthetic: bad saliency count range");
  }
  if (count < 0) throw std::invalid_argument("generate_synthetic: negative count");
  Rng rng(cfg.seed);
  std::vector<SynthCanvas> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(cfg.mode == SynthConfig::Mode::kDesigned ? make_designed_canvas(cfg, rng)
                                                           : make_random_canvas(cfg, rng));
  }
  return out;
}

}  // namespace laylab
