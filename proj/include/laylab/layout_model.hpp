#ifndef LAYLAB_LAYOUT_MODEL_HPP_
#define LAYLAB_LAYOUT_MODEL_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "laylab/geometry.hpp"

namespace laylab {

enum class ElementCategory { kText = 0, kLogo = 1, kUnderlay = 2, kEmbellishment = 3 };
inline constexpr int kCategoryCount = 4;

const char* to_string(ElementCategory c);
std::optional<ElementCategory> category_from_string(std::string_view s);

// One element of a canvas environment. geometry is empty while the element
// is masked (generation input) and concrete in annotated data.
struct ElementSpec {
  int id = 0;
  ElementCategory category = ElementCategory::kText;
  std::optional<BBox> geometry;

  bool operator==(const ElementSpec&) const = default;
};

// The serialized spatial environment: canvas dimensions in pixels, typed
// elements, and saliency boxes to keep clear.
struct CanvasSpec {
  int canvas_width = 0;
  int canvas_height = 0;
  std::vector<ElementSpec> elements;
  std::vector<BBox> saliency;

  bool operator==(const CanvasSpec&) const = default;
};

// Throws std::invalid_argument if the spec violates its invariants
// (positive dims, non-empty elements, dense ids, valid saliency boxes).
void validate_spec(const CanvasSpec& spec);

struct LayoutElement {
  int id = 0;
  ElementCategory category = ElementCategory::kText;
  BBox box;

  bool operator==(const LayoutElement&) const = default;
};

// A concrete geometric assignment for all elements of a canvas.
struct Layout {
  std::vector<LayoutElement> elements;

  bool operator==(const Layout&) const = default;
};

enum class ParseStatus { kMissingBlock, kBadJson, kSchemaMismatch, kValid };

const char* to_string(ParseStatus s);

// A parsed model response: the free-text reasoning trace plus the structured
// layout, with failures encoded in parse_status rather than exceptions.
struct DualLevelOutput {
  std::string design_trace;
  std::optional<Layout> layout;
  ParseStatus parse_status = ParseStatus::kMissingBlock;
};

// Canonical JSON environment document. Masked geometry renders as the
// literal string "[MASK]"; key order is fixed.
std::string serialize_spec(const CanvasSpec& spec);

// Inverse of serialize_spec; throws std::invalid_argument on malformed input.
CanvasSpec parse_spec(const std::string& json_text);

// Layout JSON block body ({"elements": [...]}), in spec element order.
std::string serialize_layout(const Layout& layout);

// Assembles a well-formed dual-level response, for fixtures and round trips.
std::string render_dual_output(const std::string& design_trace, const Layout& layout);

// Locates the first <design>...</design> and <layout>...</layout> blocks and
// classifies the result. Total: never throws on arbitrary input.
DualLevelOutput parse_dual_output(const std::string& raw, const CanvasSpec& spec);

// Classifies a bare layout JSON document against a spec (the <layout> block
// body). Used by parse_dual_output and by CLI paths that score stored layouts.
DualLevelOutput classify_layout_json(const std::string& json_text, const CanvasSpec& spec);

// Parses a layout JSON document without a spec: ids are assigned from array
// order. Throws std::invalid_argument on malformed input.
Layout parse_layout_json(const std::string& json_text);

struct ValidationResult {
  bool ok = false;
  std::vector<std::string> violations;
};

// Checks per-category counts against the spec and box invariants.
ValidationResult validate_layout(const Layout& layout, const CanvasSpec& spec);

}  // namespace laylab

#endif  // LAYLAB_LAYOUT_MODEL_HPP_
