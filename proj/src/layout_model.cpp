#include "laylab/layout_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace laylab {

using ordered_json = nlohmann::ordered_json;

const char* to_string(ElementCategory c) {
  switch (c) {
    case ElementCategory::kText: return "text";
    case ElementCategory::kLogo: return "logo";
    case ElementCategory::kUnderlay: return "underlay";
    case ElementCategory::kEmbellishment: return "embellishment";
  }
  return "?";
}

std::optional<ElementCategory> category_from_string(std::string_view s) {
  if (s == "text") return ElementCategory::kText;
  if (s == "logo") return ElementCategory::kLogo;
  if (s == "underlay") return ElementCategory::kUnderlay;
  if (s == "embellishment") return ElementCategory::kEmbellishment;
  return std::nullopt;
}

const char* to_string(ParseStatus s) {
  switch (s) {
    case ParseStatus::kMissingBlock: return "MISSING_BLOCK";
    case ParseStatus::kBadJson: return "BAD_JSON";
    case ParseStatus::kSchemaMismatch: return "SCHEMA_MISMATCH";
    case ParseStatus::kValid: return "VALID";
  }
  return "?";
}

void validate_spec(const CanvasSpec& spec) {
  if (spec.canvas_width <= 0 || spec.canvas_height <= 0) {
    throw std::invalid_argument("canvas dimensions must be positive");
  }
  if (spec.elements.empty()) {
    throw std::invalid_argument("spec has no elements");
  }
  for (size_t i = 0; i < spec.elements.size(); ++i) {
    if (spec.elements[i].id != static_cast<int>(i)) {
      throw std::invalid_argument("element ids must be dense 0..N-1");
    }
    if (spec.elements[i].geometry && !bbox_valid(*spec.elements[i].geometry)) {
      throw std::invalid_argument("element " + std::to_string(i) + " has invalid geometry");
    }
  }
  for (const BBox& s : spec.saliency) {
    if (!bbox_valid(s)) throw std::invalid_argument("invalid saliency box");
  }
}

namespace {

ordered_json box_to_json(const BBox& b) {
  ordered_json j;
  j["x"] = b.x;
  j["y"] = b.y;
  j["w"] = b.w;
  j["h"] = b.h;
  return j;
}

// Numeric (int or float), finite.
bool json_number(const ordered_json& j, double* out) {
  if (!j.is_number()) return false;
  const double v = j.get<double>();
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

bool box_from_json(const ordered_json& j, BBox* out) {
  if (!j.is_object()) return false;
  BBox b;
  if (!j.contains("x") || !json_number(j.at("x"), &b.x)) return false;
  if (!j.contains("y") || !json_number(j.at("y"), &b.y)) return false;
  if (!j.contains("w") || !json_number(j.at("w"), &b.w)) return false;
  if (!j.contains("h") || !json_number(j.at("h"), &b.h)) return false;
  *out = b;
  return true;
}

}  // namespace

std::string serialize_spec(const CanvasSpec& spec) {
  ordered_json j;
  j["canvas"]["width"] = spec.canvas_width;
  j["canvas"]["height"] = spec.canvas_height;
  j["elements"] = ordered_json::array();
  for (const ElementSpec& e : spec.elements) {
    ordered_json je;
    je["id"] = e.id;
    je["category"] = to_string(e.category);
    if (e.geometry) {
      je["geometry"] = box_to_json(*e.geometry);
    } else {
      je["geometry"] = "[MASK]";
    }
    j["elements"].push_back(std::move(je));
  }
  j["saliency"] = ordered_json::array();
  for (const BBox& s : spec.saliency) j["saliency"].push_back(box_to_json(s));
  return j.dump();
}

CanvasSpec parse_spec(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("canvas") || !j.contains("elements") ||
      !j.contains("saliency")) {
    throw std::invalid_argument("spec must contain canvas, elements, saliency");
  }
  CanvasSpec spec;
  const auto& canvas = j.at("canvas");
  if (!canvas.is_object() || !canvas.contains("width") || !canvas.contains("height")) {
    throw std::invalid_argument("canvas must contain width and height");
  }
  spec.canvas_width = canvas.at("width").get<int>();
  spec.canvas_height = canvas.at("height").get<int>();
  if (!j.at("elements").is_array()) throw std::invalid_argument("elements must be an array");
  for (const auto& je : j.at("elements")) {
    ElementSpec e;
    e.id = je.at("id").get<int>();
    const auto cat = category_from_string(je.at("category").get<std::string>());
    if (!cat) throw std::invalid_argument("unknown category in spec");
    e.category = *cat;
    const auto& geom = je.at("geometry");
    if (geom.is_string()) {
      if (geom.get<std::string>() != "[MASK]") {
        throw std::invalid_argument("geometry string must be \"[MASK]\"");
      }
    } else {
      BBox b;
      if (!box_from_json(geom, &b)) throw std::invalid_argument("bad geometry object");
      e.geometry = make_bbox(b.x, b.y, b.w, b.h);
    }
    spec.elements.push_back(std::move(e));
  }
  if (!j.at("saliency").is_array()) throw std::invalid_argument("saliency must be an array");
  for (const auto& js : j.at("saliency")) {
    BBox b;
    if (!box_from_json(js, &b)) throw std::invalid_argument("bad saliency box");
    spec.saliency.push_back(make_bbox(b.x, b.y, b.w, b.h));
  }
  validate_spec(spec);
  return spec;
}

std::string serialize_layout(const Layout& layout) {
  ordered_json j;
  j["elements"] = ordered_json::array();
  for (const LayoutElement& e : layout.elements) {
    ordered_json je;
    je["category"] = to_string(e.category);
    je["x"] = e.box.x;
    je["y"] = e.box.y;
    je["w"] = e.box.w;
    je["h"] = e.box.h;
    j["elements"].push_back(std::move(je));
  }
  return j.dump();
}

std::string render_dual_output(const std::string& design_trace, const Layout& layout) {
  return "<design>" + design_trace + "</design>\n<layout>" +
         serialize_layout(layout) + "</layout>";
}

DualLevelOutput classify_layout_json(const std::string& json_text, const CanvasSpec& spec) {
  DualLevelOutput out;
  ordered_json j = ordered_json::parse(json_text, nullptr, false);
  if (j.is_discarded()) {
    out.parse_status = ParseStatus::kBadJson;
    return out;
  }
  out.parse_status = ParseStatus::kSchemaMismatch;
  if (!j.is_object() || !j.contains("elements") || !j.at("elements").is_array()) {
    return out;
  }

  struct Parsed {
    ElementCategory category;
    BBox box;
  };
  std::vector<Parsed> parsed;
  for (const auto& je : j.at("elements")) {
    if (!je.is_object() || !je.contains("category") || !je.at("category").is_string()) {
      return out;
    }
    const auto cat = category_from_string(je.at("category").get<std::string>());
    if (!cat) return out;
    BBox b;
    if (!box_from_json(je, &b)) return out;
    // Geometry must itself satisfy the box invariants; anything else cannot
    // feed the reward formulas and counts as a schema violation.
    if (!bbox_valid(b)) return out;
    parsed.push_back({*cat, b});
  }

  // Category multiset must match the spec; ids are assigned by order of
  // appearance within each category, following the spec's own order.
  std::array<std::vector<int>, kCategoryCount> spec_ids;
  for (const ElementSpec& e : spec.elements) {
    spec_ids[static_cast<int>(e.category)].push_back(e.id);
  }
  std::array<size_t, kCategoryCount> used{};
  Layout layout;
  layout.elements.resize(spec.elements.size());
  if (parsed.size() != spec.elements.size()) return out;
  for (const Parsed& p : parsed) {
    const int c = static_cast<int>(p.category);
    if (used[c] >= spec_ids[c].size()) return out;
    const int id = spec_ids[c][used[c]++];
    layout.elements[id] = LayoutElement{id, p.category, p.box};
  }
  for (int c = 0; c < kCategoryCount; ++c) {
    if (used[c] != spec_ids[c].size()) return out;
  }

  out.layout = std::move(layout);
  out.parse_status = ParseStatus::kValid;
  return out;
}

Layout parse_layout_json(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("layout is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("elements") || !j.at("elements").is_array()) {
    throw std::invalid_argument("layout must contain an elements array");
  }
  Layout layout;
  int id = 0;
  for (const auto& je : j.at("elements")) {
    const auto cat = category_from_string(je.at("category").get<std::string>());
    if (!cat) throw std::invalid_argument("unknown category in layout");
    BBox b;
    if (!box_from_json(je, &b)) throw std::invalid_argument("bad element geometry");
    layout.elements.push_back(LayoutElement{id++, *cat, b});
  }
  return layout;
}

namespace {

// First <tag>...</tag> block; nullopt when either tag is absent.
std::optional<std::string> extract_block(const std::string& raw, const std::string& tag) {
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";
  const size_t b = raw.find(open);
  if (b == std::string::npos) return std::nullopt;
  const size_t start = b + open.size();
  const size_t e = raw.find(close, start);
  if (e == std::string::npos) return std::nullopt;
  return raw.substr(start, e - start);
}

}  // namespace

DualLevelOutput parse_dual_output(const std::string& raw, const CanvasSpec& spec) {
  const auto design = extract_block(raw, "design");
  const auto layout_body = extract_block(raw, "layout");
  if (!design || !layout_body) {
    return DualLevelOutput{design.value_or(""), std::nullopt, ParseStatus::kMissingBlock};
  }
  DualLevelOutput out = classify_layout_json(*layout_body, spec);
  out.design_trace = *design;
  return out;
}

ValidationResult validate_layout(const Layout& layout, const CanvasSpec& spec) {
  ValidationResult res;
  std::array<int, kCategoryCount> want{}, got{};
  for (const ElementSpec& e : spec.elements) want[static_cast<int>(e.category)]++;
  for (const LayoutElement& e : layout.elements) got[static_cast<int>(e.category)]++;

  // Per-category checks subsume the total count (categories partition it).
  for (int c = 0; c < kCategoryCount; ++c) {
    if (want[c] != got[c]) {
      res.violations.push_back(std::string(to_string(static_cast<ElementCategory>(c))) +
                               " count " + std::to_string(got[c]) +
                               " does not match spec count " + std::to_string(want[c]));
    }
  }
  for (const LayoutElement& e : layout.elements) {
    const BBox& b = e.box;
    if (!(b.w > 0.0 && b.h > 0.0)) {
      res.violations.push_back("element " + std::to_string(e.id) + " has non-positive size");
    } else if (b.x < 0.0 || b.y < 0.0 || b.x + b.w > 1.0 + kBoxEpsilon ||
               b.y + b.h > 1.0 + kBoxEpsilon) {
      res.violations.push_back("element " + std::to_string(e.id) + " exceeds canvas");
    }
  }
  res.ok = res.violations.empty();
  return res;
}

}  // namespace laylab
