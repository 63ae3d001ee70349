#include <doctest.h>

#include <stdexcept>

#include <string>

#include "fixtures.hpp"
#include "laylab/datakit.hpp"
#include "laylab/layout_model.hpp"
#include "laylab/rng.hpp"

using namespace laylab;
using laylab::testing::layout_of;
using laylab::testing::spec_for;

namespace {

CanvasSpec small_spec() {
  CanvasSpec spec;
  spec.canvas_width = 513;
  spec.canvas_height = 750;
  spec.elements.push_back({0, ElementCategory::kText, std::nullopt});
  spec.elements.push_back({1, ElementCategory::kUnderlay, std::nullopt});
  spec.elements.push_back({2, ElementCategory::kText, std::nullopt});
  spec.saliency.push_back({0.1, 0.1, 0.2, 0.2});
  return spec;
}

size_t count_substr(const std::string& text, const std::string& needle) {
  size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("serialize_spec masks geometry and keeps empty saliency explicit") {
  CanvasSpec spec;
  spec.canvas_width = 100;
  spec.canvas_height = 100;
  spec.elements.push_back({0, ElementCategory::kText, std::nullopt});
  const std::string json = serialize_spec(spec);
  CHECK(count_substr(json, "\"geometry\":\"[MASK]\"") == 1);
  CHECK(json.find("\"saliency\":[]") != std::string::npos);
}

TEST_CASE("serialize/parse round trip on fuzzed specs") {
  SynthConfig cfg;
  cfg.seed = 99;
  cfg.mode = SynthConfig::Mode::kRandom;
  const auto canvases = generate_synthetic(cfg, 1000);
  for (const SynthCanvas& c : canvases) {
    CHECK(parse_spec(serialize_spec(c.spec)) == c.spec);
  }
  // concrete geometry survives the round trip too
  CanvasSpec spec = canvases[0].spec;
  for (size_t i = 0; i < spec.elements.size(); ++i) {
    spec.elements[i].geometry = canvases[0].reference->elements[i].box;
  }
  CHECK(parse_spec(serialize_spec(spec)) == spec);
}

TEST_CASE("parse_dual_output classifies hierarchically") {
  const CanvasSpec spec = small_spec();

  SUBCASE("missing layout block") {
    const auto out = parse_dual_output("<design>plan</design> no layout here", spec);
    CHECK(out.parse_status == ParseStatus::kMissingBlock);
  }
  SUBCASE("missing design block") {
    const auto out = parse_dual_output("<layout>{\"elements\":[]}</layout>", spec);
    CHECK(out.parse_status == ParseStatus::kMissingBlock);
  }
  SUBCASE("unterminated block is missing") {
    const auto out = parse_dual_output("<design>plan</design><layout>{", spec);
    CHECK(out.parse_status == ParseStatus::kMissingBlock);
  }
  SUBCASE("bad json") {
    const auto out = parse_dual_output("<design>d</design><layout>{not json</layout>", spec);
    CHECK(out.parse_status == ParseStatus::kBadJson);
  }
  SUBCASE("count mismatch") {
    const std::string two_texts =
        R"({"elements":[{"category":"text","x":0.1,"y":0.1,"w":0.2,"h":0.1},)"
        R"({"category":"text","x":0.1,"y":0.3,"w":0.2,"h":0.1}]})";
    const auto out =
        parse_dual_output("<design>d</design><layout>" + two_texts + "</layout>", spec);
    CHECK(out.parse_status == ParseStatus::kSchemaMismatch);
  }
  SUBCASE("out-of-canvas geometry is a schema violation") {
    const std::string body =
        R"({"elements":[{"category":"text","x":0.9,"y":0.1,"w":0.6,"h":0.1},)"
        R"({"category":"underlay","x":0.1,"y":0.3,"w":0.2,"h":0.1},)"
        R"({"category":"text","x":0.1,"y":0.5,"w":0.2,"h":0.1}]})";
    const auto out = parse_dual_output("<design>d</design><layout>" + body + "</layout>", spec);
    CHECK(out.parse_status == ParseStatus::kSchemaMismatch);
  }
  SUBCASE("valid output with category matching by order") {
    const std::string body =
        R"({"elements":[{"category":"text","x":0.1,"y":0.1,"w":0.2,"h":0.1},)"
        R"({"category":"text","x":0.1,"y":0.5,"w":0.2,"h":0.1},)"
        R"({"category":"underlay","x":0.05,"y":0.05,"w":0.4,"h":0.2}]})";
    const auto out = parse_dual_output("<design> plan </design>\n<layout>" + body +
                                           "</layout>trailing chatter",
                                       spec);
    REQUIRE(out.parse_status == ParseStatus::kValid);
    CHECK(out.design_trace == " plan ");
    REQUIRE(out.layout.has_value());
    // spec order: text(0), underlay(1), text(2); JSON text order fills 0 then 2
    CHECK(out.layout->elements[0].category == ElementCategory::kText);
    CHECK(out.layout->elements[0].box.y == doctest::Approx(0.1));
    CHECK(out.layout->elements[1].category == ElementCategory::kUnderlay);
    CHECK(out.layout->elements[2].box.y == doctest::Approx(0.5));
    CHECK(validate_layout(*out.layout, spec).ok);
  }
  SUBCASE("first layout block wins") {
    const std::string body =
        R"({"elements":[{"category":"text","x":0.1,"y":0.1,"w":0.2,"h":0.1},)"
        R"({"category":"text","x":0.1,"y":0.5,"w":0.2,"h":0.1},)"
        R"({"category":"underlay","x":0.05,"y":0.05,"w":0.4,"h":0.2}]})";
    const auto out = parse_dual_output("<design>d</design><layout>" + body +
                                           "</layout><layout>{garbage</layout>",
                                       spec);
    CHECK(out.parse_status == ParseStatus::kValid);
  }
}

TEST_CASE("parse_dual_output accepts its own fixture emitter") {
  SynthConfig cfg;
  cfg.seed = 123;
  const auto canvases = generate_synthetic(cfg, 50);
  for (const SynthCanvas& c : canvases) {
    const std::string text = render_dual_output("reasoning goes here", *c.reference);
    const auto out = parse_dual_output(text, c.spec);
    REQUIRE(out.parse_status == ParseStatus::kValid);
    CHECK(*out.layout == *c.reference);
  }
}

TEST_CASE("validate_layout reports violations") {
  const CanvasSpec spec = small_spec();
  Layout ok = layout_of({{ElementCategory::kText, {0.1, 0.1, 0.2, 0.1}},
                         {ElementCategory::kUnderlay, {0.05, 0.3, 0.4, 0.2}},
                         {ElementCategory::kText, {0.1, 0.6, 0.2, 0.1}}});
  CHECK(validate_layout(ok, spec).ok);

  Layout oob = ok;
  oob.elements[2].box = BBox{1.0, 0.6, 0.5, 0.1};  // x+w = 1.5
  const auto res = validate_layout(oob, spec);
  CHECK_FALSE(res.ok);
  REQUIRE(res.violations.size() == 1);
  CHECK(res.violations[0] == "element 2 exceeds canvas");

  Layout missing = ok;
  missing.elements[1].category = ElementCategory::kLogo;  // drops the underlay
  const auto res2 = validate_layout(missing, spec);
  CHECK_FALSE(res2.ok);
  CHECK(res2.violations.size() == 2);  // logo surplus + underlay missing
}

TEST_CASE("every input maps to exactly one status") {
  const CanvasSpec spec = small_spec();
  Rng rng(7);
  const std::string symbols = "<design></design><layout>{}[]\",:0.5 text";
  for (int i = 0; i < 2000; ++i) {
    std::string garbage;
    const int len = rng.uniform_int(0, 60);
    for (int k = 0; k < len; ++k) {
      garbage += symbols[rng.uniform_int(0, static_cast<int>(symbols.size()) - 1)];
    }
    const auto out = parse_dual_output(garbage, spec);
    const int s = static_cast<int>(out.parse_status);
    CHECK(s >= 0);
    CHECK(s <= 3);
  }
}
