#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "laylab/geometry.hpp"
#include "laylab/rng.hpp"

using namespace laylab;

namespace {

BBox random_box(Rng& rng, double min_size = 0.05, double max_size = 0.6) {
  const double w = min_size + (max_size - min_size) * rng.uniform();
  const double h = min_size + (max_size - min_size) * rng.uniform();
  return BBox{rng.uniform() * (1.0 - w), rng.uniform() * (1.0 - h), w, h};
}

}  // namespace

TEST_CASE("bbox validity") {
  CHECK(bbox_valid({0, 0, 1, 1}));
  CHECK(bbox_valid({0.5, 0.5, 0.5, 0.5}));
  CHECK_FALSE(bbox_valid({0, 0, 0, 0.5}));     // zero width
  CHECK_FALSE(bbox_valid({0.7, 0.1, 0.5, 0.3}));  // spills right
  CHECK_FALSE(bbox_valid({-0.1, 0, 0.5, 0.5}));
  CHECK(bbox_valid({0, 0, 1.0 + 5e-7, 0.5}));  // within tolerance
  CHECK_THROWS_AS(make_bbox(0, 0, 0, 0.1), std::invalid_argument);
  CHECK_NOTHROW(make_bbox(0.1, 0.2, 0.5, 0.1));
}

TEST_CASE("area") {
  CHECK(area({0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(area({0.1, 0.2, 0.5, 0.1}) == doctest::Approx(0.05));
  CHECK(area({0, 0, 0.25, 0.25}) == doctest::Approx(0.0625));
}

TEST_CASE("intersect_area") {
  const BBox a{0, 0, 0.5, 0.5};
  CHECK(intersect_area(a, a) == doctest::Approx(0.25));
  CHECK(intersect_area({0, 0, 0.2, 0.2}, {0.5, 0.5, 0.2, 0.2}) == 0.0);
  CHECK(intersect_area(a, {0.25, 0.25, 0.5, 0.5}) == doctest::Approx(0.0625));
  CHECK(intersect_area({0.25, 0.25, 0.5, 0.5}, a) == doctest::Approx(0.0625));
}

TEST_CASE("iou worked examples") {
  const BBox a{0, 0, 0.5, 0.5};
  const BBox b{0.25, 0.25, 0.5, 0.5};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou({0, 0, 0.2, 0.2}, {0.5, 0.5, 0.2, 0.2}) == 0.0);
  CHECK(iou(a, b) == doctest::Approx(0.0625 / 0.4375));
}

TEST_CASE("center") {
  CHECK(center({0, 0, 1, 1}) == Point{0.5, 0.5});
  CHECK(center({0.1, 0.2, 0.4, 0.2}).x == doctest::Approx(0.3));
  CHECK(center({0.1, 0.2, 0.4, 0.2}).y == doctest::Approx(0.3));
  CHECK(center({0, 0, 0.2, 0.6}).x == doctest::Approx(0.1));
  CHECK(center({0, 0, 0.2, 0.6}).y == doctest::Approx(0.3));
}

TEST_CASE("iou bounds and symmetry on fuzzed boxes") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box(rng), b = random_box(rng);
    const double inter = intersect_area(a, b);
    CHECK(inter >= 0.0);
    CHECK(inter <= std::min(area(a), area(b)) + 1e-12);
    CHECK(iou(a, b) == doctest::Approx(iou(b, a)));
    CHECK(iou(a, b) >= 0.0);
    CHECK(iou(a, b) <= 1.0);
    CHECK(iou(a, a) == doctest::Approx(1.0));
  }
}

TEST_CASE("translating away never increases intersection") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const BBox a = random_box(rng);
    BBox b = random_box(rng, 0.05, 0.3);
    double prev = intersect_area(a, b);
    while (b.x + b.w < 1.0 - 0.05) {
      // once b starts at or right of a, moving further right is moving away
      const bool moving_away = b.x >= a.x;
      b.x += 0.05;
      const double cur = intersect_area(a, b);
      if (moving_away) CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("rasterized union overlap basics") {
  const std::vector<BBox> full{{0, 0, 1, 1}};
  const std::vector<BBox> quarter{{0, 0, 0.5, 0.5}};
  CHECK(rasterized_union_overlap(full, quarter, 512) == doctest::Approx(1.0).epsilon(2.0 / 512));
  CHECK(rasterized_union_overlap({}, quarter, 512) == 0.0);

  const std::vector<BBox> left{{0, 0, 0.5, 1}};
  const std::vector<BBox> middle{{0.25, 0, 0.5, 1}};
  CHECK(rasterized_union_overlap(left, middle, 512) ==
        doctest::Approx(0.5).epsilon(2.0 / 512));
  CHECK_THROWS_AS(rasterized_union_overlap(left, middle, 8), std::invalid_argument);
}

TEST_CASE("rasterized union overlap converges with resolution") {
  Rng rng(13);
  for (int trial = 0; trial < 120; ++trial) {
    std::vector<BBox> as, bs;
    const int na = rng.uniform_int(0, 3), nb = rng.uniform_int(1, 3);
    for (int i = 0; i < na; ++i) as.push_back(random_box(rng, 0.05, 0.6));
    for (int i = 0; i < nb; ++i) bs.push_back(random_box(rng, 0.15, 0.6));
    const int res = 128 << rng.uniform_int(0, 1);
    const double coarse = rasterized_union_overlap(as, bs, res);
    const double fine = rasterized_union_overlap(as, bs, 2 * res);
    CHECK(std::abs(coarse - fine) <= 4.0 / res);
  }
}
