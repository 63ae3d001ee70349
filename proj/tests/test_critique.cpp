#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "laylab/critique.hpp"
#include "laylab/datakit.hpp"

using namespace laylab;
using laylab::testing::layout_of;
using laylab::testing::spec_for;
using laylab::testing::wrap_valid;
using C = ElementCategory;

namespace {

nlohmann::json frozen_oracle() {
  std::ifstream in(std::string(LAYLAB_TEST_DIR) + "/oracle/derived_values.json");
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("format reward hierarchy") {
  CHECK(format_reward(ParseStatus::kMissingBlock) == 0.1);
  CHECK(format_reward(ParseStatus::kBadJson) == 0.2);
  CHECK(format_reward(ParseStatus::kSchemaMismatch) == 0.5);
  CHECK(format_reward(ParseStatus::kValid) == 1.0);
}

TEST_CASE("inverse collision") {
  SUBCASE("single element, no saliency: vacuous 1.0") {
    CHECK(inverse_collision(layout_of({{C::kText, {0.2, 0.2, 0.3, 0.2}}}), {}) == 1.0);
  }
  SUBCASE("two disjoint texts") {
    const Layout l = layout_of({{C::kText, {0.1, 0.1, 0.2, 0.1}},
                                {C::kText, {0.6, 0.6, 0.2, 0.1}}});
    CHECK(inverse_collision(l, {}) == doctest::Approx(1.0));
  }
  SUBCASE("two identical texts score 0, underlay+text pair is compatible") {
    const BBox b{0.2, 0.2, 0.3, 0.3};
    CHECK(inverse_collision(layout_of({{C::kText, b}, {C::kText, b}}), {}) ==
          doctest::Approx(0.0));
    CHECK(inverse_collision(layout_of({{C::kUnderlay, b}, {C::kText, b}}), {}) == 1.0);
  }
  SUBCASE("saliency counts against non-underlay elements only") {
    const BBox b{0.2, 0.2, 0.3, 0.3};
    const std::vector<BBox> sal{b};
    CHECK(inverse_collision(layout_of({{C::kText, b}}), sal) == doctest::Approx(0.0));
    CHECK(inverse_collision(layout_of({{C::kUnderlay, b}}), sal) == 1.0);
  }
  SUBCASE("strictly decreasing as one incompatible pair overlaps more") {
    double prev = 2.0;
    for (double shift = 0.0; shift < 0.3; shift += 0.05) {
      const Layout l = layout_of({{C::kText, {0.0, 0.0, 0.3, 0.3}},
                                  {C::kLogo, {0.3 - shift, 0.0, 0.3, 0.3}}});
      const double score = inverse_collision(l, {});
      CHECK(score < prev);
      prev = score;
    }
  }
}

TEST_CASE("alignment worked examples") {
  const auto oracle = frozen_oracle();
  SUBCASE("centered single element is perfect") {
    CHECK(alignment_score(layout_of({{C::kText, {0.4, 0.4, 0.2, 0.2}}}), 0.5) ==
          doctest::Approx(1.0));
  }
  SUBCASE("corner-centered element, alpha 1") {
    // center exactly at (0,0); the box itself is only a carrier here
    const Layout corner = layout_of({{C::kText, {-0.05, -0.05, 0.1, 0.1}}});
    CHECK(alignment_score(corner, 1.0) ==
          doctest::Approx(oracle.at("align_corner_alpha1").get<double>()));
  }
  SUBCASE("two stacked elements, alpha 0") {
    const Layout l = layout_of({{C::kText, {0.4, 0.2, 0.2, 0.1}},
                                {C::kText, {0.4, 0.7, 0.2, 0.1}}});
    CHECK(alignment_score(l, 0.0) ==
          doctest::Approx(oracle.at("align_two_alpha0").get<double>()));
  }
  SUBCASE("pulling centers toward the canvas center never decreases it (alpha 1)") {
    SynthConfig cfg;
    cfg.seed = 31;
    const auto canvases = generate_synthetic(cfg, 200);
    for (const SynthCanvas& c : canvases) {
      const Layout& l = *c.reference;
      Layout pulled = l;
      for (LayoutElement& e : pulled.elements) {
        const Point ctr = center(e.box);
        const double t = 0.7;  // contract toward (0.5, 0.5)
        e.box.x = 0.5 + t * (ctr.x - 0.5) - e.box.w / 2.0;
        e.box.y = 0.5 + t * (ctr.y - 0.5) - e.box.h / 2.0;
      }
      CHECK(alignment_score(pulled, 1.0) >= alignment_score(l, 1.0) - 1e-12);
    }
  }
}

TEST_CASE("distribution worked examples") {
  const auto oracle = frozen_oracle();
  CHECK(distribution_score(layout_of({{C::kText, {0.4, 0.4, 0.2, 0.2}}})) ==
        doctest::Approx(oracle.at("dist_single_centered").get<double>()));
  const Layout two = layout_of({{C::kText, {0.05, 0.45, 0.1, 0.1}},
                                {C::kText, {0.85, 0.45, 0.1, 0.1}}});
  CHECK(distribution_score(two) == doctest::Approx(oracle.at("dist_two_spread").get<double>()));

  // nine elements, one per grid cell
  std::vector<std::pair<C, BBox>> nine;
  for (int gx = 0; gx < 3; ++gx) {
    for (int gy = 0; gy < 3; ++gy) {
      nine.push_back({C::kText, BBox{gx / 3.0 + 0.1, gy / 3.0 + 0.1, 0.12, 0.12}});
    }
  }
  const Layout grid = layout_of(nine);
  // V_grid = 1; score = (V_spread + 1) / 2 >= 0.5
  CHECK(distribution_score(grid) >= 0.5);
}

TEST_CASE("spacing consistency worked examples") {
  const auto oracle = frozen_oracle();
  const Layout uniform = layout_of({{C::kText, {0.3, 0.15, 0.2, 0.1}},
                                    {C::kText, {0.3, 0.45, 0.2, 0.1}},
                                    {C::kText, {0.3, 0.75, 0.2, 0.1}}});
  CHECK(spacing_consistency(uniform) == doctest::Approx(1.0));

  const Layout irregular = layout_of({{C::kText, {0.3, 0.05, 0.2, 0.1}},
                                      {C::kText, {0.3, 0.15, 0.2, 0.1}},
                                      {C::kText, {0.3, 0.75, 0.2, 0.1}}});
  CHECK(spacing_consistency(irregular) ==
        doctest::Approx(oracle.at("spacing_irregular").get<double>()));

  const Layout two = layout_of({{C::kText, {0.3, 0.1, 0.2, 0.1}},
                                {C::kText, {0.3, 0.8, 0.2, 0.1}}});
  CHECK(spacing_consistency(two) == 1.0);

  // identical centers: mean spacing 0 is vacuously uniform
  const BBox same{0.3, 0.4, 0.2, 0.1};
  CHECK(spacing_consistency(layout_of({{C::kText, same}, {C::kText, same}, {C::kText, same}})) ==
        1.0);
}

TEST_CASE("underlay-text constraint") {
  CHECK(underlay_text_score(layout_of({{C::kText, {0.1, 0.1, 0.2, 0.1}}})) == 1.0);

  // full containment of exactly one text
  const Layout exact = layout_of({{C::kUnderlay, {0.2, 0.2, 0.5, 0.3}},
                                  {C::kText, {0.3, 0.3, 0.3, 0.1}}});
  CHECK(underlay_text_score(exact) == doctest::Approx(1.0));

  // two texts on one underlay
  const Layout two = layout_of({{C::kUnderlay, {0.2, 0.2, 0.5, 0.3}},
                                {C::kText, {0.25, 0.3, 0.15, 0.1}},
                                {C::kText, {0.5, 0.3, 0.15, 0.1}}});
  CHECK(underlay_text_score(two) == 0.0);

  // untouched underlay
  const Layout lonely = layout_of({{C::kUnderlay, {0.6, 0.6, 0.3, 0.3}},
                                   {C::kText, {0.05, 0.05, 0.2, 0.1}}});
  CHECK(underlay_text_score(lonely) == 0.0);

  // ordinal structure: exact > partial > zero, on the same underlay
  const Layout partial = layout_of({{C::kUnderlay, {0.2, 0.2, 0.5, 0.3}},
                                    {C::kText, {0.6, 0.3, 0.3, 0.1}}});
  const double p = underlay_text_score(partial);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
}

TEST_CASE("iou reward with greedy matching") {
  const auto oracle = frozen_oracle();
  const Layout ref = layout_of({{C::kText, {0.1, 0.1, 0.5, 0.5}},
                                {C::kText, {0.1, 0.7, 0.3, 0.2}}});
  CHECK(iou_reward(ref, ref) == doctest::Approx(1.0));

  Layout pred = ref;
  pred.elements[0].box = BBox{0.35, 0.35, 0.5, 0.5};  // IoU 1/7 with ref[0]
  // make element 1 exact, element 0 the worked quarter-shift pair
  Layout ref2 = layout_of({{C::kText, {0.1, 0.1, 0.5, 0.5}},
                           {C::kText, {0.1, 0.7, 0.3, 0.2}}});
  Layout pred2 = layout_of({{C::kText, {0.35, 0.35, 0.5, 0.5}},
                            {C::kText, {0.1, 0.7, 0.3, 0.2}}});
  CHECK(iou_reward(pred2, ref2) ==
        doctest::Approx(oracle.at("iou_reward_two_texts").get<double>()));

  // all disjoint
  const Layout far = layout_of({{C::kText, {0.7, 0.05, 0.2, 0.1}},
                                {C::kText, {0.7, 0.25, 0.2, 0.1}}});
  CHECK(iou_reward(far, ref) == doctest::Approx(0.0));

  // count mismatch is an error
  const Layout extra = layout_of({{C::kText, {0.1, 0.1, 0.2, 0.1}},
                                  {C::kLogo, {0.5, 0.5, 0.2, 0.1}}});
  CHECK_THROWS_AS(iou_reward(extra, ref), std::invalid_argument);
}

TEST_CASE("quality reward composes the worked examples") {
  const auto oracle = frozen_oracle();
  const Layout centered = layout_of({{C::kText, {0.4, 0.4, 0.2, 0.2}}});
  RewardBreakdown b;
  const double q = quality_reward(centered, {}, QualityWeights(), CompatibilityMatrix(), &b);
  CHECK(q == doctest::Approx(oracle.at("quality_single_centered").get<double>()));
  CHECK(b.quality == doctest::Approx(q));
  CHECK(b.icr == 1.0);
  CHECK(b.spacing == 1.0);
  CHECK(b.underlay == 1.0);
}

TEST_CASE("hybrid reward folds weights correctly") {
  const auto oracle = frozen_oracle();
  const Layout centered = layout_of({{C::kText, {0.4, 0.4, 0.2, 0.2}}});
  const CanvasSpec spec = spec_for(centered);

  SUBCASE("missing block with reference present") {
    DualLevelOutput out;
    out.parse_status = ParseStatus::kMissingBlock;
    const auto b = hybrid_reward(out, spec, &centered, RewardWeights::balanced_hybrid());
    CHECK(b.total == doctest::Approx(oracle.at("hybrid_missing_balanced").get<double>()));
    CHECK(b.quality == 0.0);
    REQUIRE(b.iou.has_value());
    CHECK(*b.iou == 0.0);
  }
  SUBCASE("maximal valid candidate") {
    const auto b = hybrid_reward(wrap_valid(centered), spec, &centered,
                                 RewardWeights::balanced_hybrid());
    REQUIRE(b.iou.has_value());
    CHECK(*b.iou == doctest::Approx(1.0));
    CHECK(b.total == doctest::Approx(0.1 * 1.0 + 0.45 * b.quality + 0.45 * 1.0));
  }
  SUBCASE("no reference folds iou mass into quality") {
    const auto b = hybrid_reward(wrap_valid(centered), spec, nullptr,
                                 RewardWeights::quality_focused());
    CHECK_FALSE(b.iou.has_value());
    CHECK(b.total == doctest::Approx(0.1 * b.format + 0.9 * b.quality));
  }
  SUBCASE("linear in each weight holding components fixed") {
    const auto base = hybrid_reward(wrap_valid(centered), spec, &centered,
                                    RewardWeights{0.2, 0.3, 0.5});
    const auto bumped = hybrid_reward(wrap_valid(centered), spec, &centered,
                                      RewardWeights{0.4, 0.3, 0.5});
    CHECK(bumped.total - base.total == doctest::Approx(0.2 * base.format));
  }
}

TEST_CASE("reward components stay in range on fuzzed layouts") {
  SynthConfig cfg;
  cfg.seed = 5;
  const auto canvases = generate_synthetic(cfg, 1500);
  for (const auto& preset : {RewardWeights::quality_focused(), RewardWeights::balanced_hybrid()}) {
    for (const SynthCanvas& c : canvases) {
      const auto b = hybrid_reward(wrap_valid(*c.reference), c.spec, &*c.reference, preset);
      for (double v : {b.format, b.icr, b.align, b.dist, b.spacing, b.underlay, b.quality,
                       b.iou.value_or(0.0), b.total}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("paired fixtures: each targeted sub-score prefers the good layout") {
  for (const auto& pair : laylab::testing::score_pairs()) {
    INFO(pair.name);
    CHECK(pair.score(pair.good) >= pair.score(pair.bad) + 0.1);
  }
}

TEST_CASE("quality weights validation") {
  CHECK_NOTHROW(validate_weights(QualityWeights()));
  QualityWeights bad;
  bad.icr = 0.5;
  CHECK_THROWS_AS(validate_weights(bad), std::invalid_argument);
  QualityWeights neg;
  neg.icr = -0.2;
  neg.align = 0.6;
  CHECK_THROWS_AS(validate_weights(neg), std::invalid_argument);
}

TEST_CASE("breakdown serializes with fixed keys") {
  RewardBreakdown b;
  b.format = 1.0;
  b.total = 0.5;
  const std::string with_null = to_json(b);
  CHECK(with_null.find("\"iou\":null") != std::string::npos);
  b.iou = 0.25;
  CHECK(to_json(b).find("\"iou\":0.25") != std::string::npos);
  for (const char* key : {"format", "icr", "align", "dist", "spacing", "underlay", "quality",
                          "total"}) {
    CHECK(with_null.find("\"" + std::string(key) + "\":") != std::string::npos);
  }
}
