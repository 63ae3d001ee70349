#ifndef LAYLAB_DATAKIT_HPP_
#define LAYLAB_DATAKIT_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "laylab/layout_model.hpp"

namespace laylab {

struct PixelBox {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;

  bool operator==(const PixelBox&) const = default;
};

struct AnnotationElement {
  ElementCategory category = ElementCategory::kText;
  PixelBox bbox_px;

  bool operator==(const AnnotationElement&) const = default;
};

// One annotated canvas in the canonical JSONL format: pixel-space boxes plus
// a train/test split tag.
struct AnnotationRecord {
  std::string id;
  int canvas_width = 0;
  int canvas_height = 0;
  std::string split = "train";
  std::vector<AnnotationElement> elements;
  std::vector<PixelBox> saliency;

  bool operator==(const AnnotationRecord&) const = default;
};

struct LoadOptions {
  bool strict = false;  // malformed lines are fatal instead of skipped
};

struct LoadResult {
  std::vector<AnnotationRecord> records;
  std::vector<std::string> warnings;  // one per skipped line, with line number
};

// Reads annotation JSONL. Throws std::runtime_error on unreadable files and
// when no valid record remains; in strict mode any malformed line throws.
LoadResult load_annotations(const std::string& path, const LoadOptions& options = {});

std::string annotation_to_json(const AnnotationRecord& rec);
AnnotationRecord annotation_from_json(const std::string& line);  // throws on malformed

void write_annotations(const std::string& path, std::span<const AnnotationRecord> records);

// Normalizes pixel boxes by the canvas dimensions: a masked CanvasSpec for
// generation plus the ground-truth reference layout.
std::pair<CanvasSpec, Layout> to_canvas_spec(const AnnotationRecord& rec);

// Denormalizes back to an annotation record (canvas dims taken from spec).
AnnotationRecord to_annotation(const CanvasSpec& spec, const Layout& reference,
                               const std::string& id, const std::string& split = "train");

struct SynthConfig {
  enum class Mode { kRandom, kDesigned };

  Mode mode = Mode::kRandom;
  int min_elements = 2;
  int max_elements = 8;
  double underlay_prob = 0.3;
  int min_saliency = 0;
  int max_saliency = 2;
  bool allow_embellishment = true;
  int canvas_width = 900;
  int canvas_height = 1200;
  uint64_t seed = 0;
};

struct SynthCanvas {
  CanvasSpec spec;                  // masked elements + saliency
  std::optional<Layout> reference;  // concrete geometry behind the spec
};

// Deterministic synthetic canvases. Designed mode builds near-ideal layouts:
// every underlay contains exactly one text, element centers form a uniform
// vertical rhythm, and elements stay clear of saliency regions.
std::vector<SynthCanvas> generate_synthetic(const SynthConfig& cfg, int count);

}  // namespace laylab

#endif  // LAYLAB_DATAKIT_HPP_
