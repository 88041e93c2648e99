#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "osc/evaluator.hpp"
#include "osc/geometry.hpp"
#include "support/oracles.hpp"

using namespace osc;

TEST(Geometry, IouBasics) {
  const BoundingBox a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, {10, 0, 10, 10}), 0.0);  // touching edges
  EXPECT_DOUBLE_EQ(iou(a, {5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(iou(a, {20, 0, 10, 8}), 0.0);
  EXPECT_DOUBLE_EQ(iou({20, 0, 10, 10}, {20, 0, 10, 8}), 0.8);
}

TEST(Geometry, IouMatchesOracleAndIsSymmetric) {
  std::mt19937_64 g(7);
  for (int t = 0; t < 2000; ++t) {
    const BoundingBox a{oracle::uniform(g, -20, 50), oracle::uniform(g, -20, 50),
                        oracle::uniform(g, 0.5, 40), oracle::uniform(g, 0.5, 40)};
    const BoundingBox b{oracle::uniform(g, -20, 50), oracle::uniform(g, -20, 50),
                        oracle::uniform(g, 0.5, 40), oracle::uniform(g, 0.5, 40)};
    const double v = iou(a, b);
    EXPECT_NEAR(v, oracle::box_iou(a, b), 1e-12);
    EXPECT_DOUBLE_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Geometry, ExtendBoxVerticalKeepsCenter) {
  std::mt19937_64 g(11);
  for (int t = 0; t < 1000; ++t) {
    const BoundingBox b{oracle::uniform(g, -100, 100), oracle::uniform(g, -100, 100),
                        oracle::uniform(g, 1, 300), oracle::uniform(g, 1, 300)};
    const double f = oracle::uniform(g, 0, 2);
    const BoundingBox e = extend_box_vertical(b, f);
    EXPECT_NEAR(e.center_x(), b.center_x(), 1e-9);
    EXPECT_NEAR(e.center_y(), b.center_y(), 1e-9);
    EXPECT_DOUBLE_EQ(e.w, b.w);
    EXPECT_NEAR(e.h, b.h * (1 + f), 1e-9);
  }
  EXPECT_THROW(extend_box_vertical({0, 0, 1, 1}, -0.1), std::invalid_argument);
}

TEST(Geometry, InscribedEllipseTouchesBoxSides) {
  const Ellipse e = inscribe_ellipse({10, 20, 40, 60});
  EXPECT_DOUBLE_EQ(e.cx, 30);
  EXPECT_DOUBLE_EQ(e.cy, 50);
  EXPECT_DOUBLE_EQ(e.ra, 30);  // vertical
  EXPECT_DOUBLE_EQ(e.rb, 20);
  EXPECT_EQ(e.bounds(), (BoundingBox{10, 20, 40, 60}));
}

TEST(Geometry, InscribedEllipseAreaOnLargeBoxes) {
  std::mt19937_64 g(3);
  for (int t = 0; t < 20; ++t) {
    const double w = oracle::uniform(g, 200, 400), h = oracle::uniform(g, 200, 400);
    const BoundingBox b{oracle::uniform(g, 0, 10), oracle::uniform(g, 0, 10), w, h};
    const long long n = rasterized_area(inscribe_ellipse(b), Canvas{500, 500});
    const double expect = std::numbers::pi / 4 * w * h;
    EXPECT_NEAR(n / expect, 1.0, 0.01) << w << "x" << h;
  }
}

TEST(Geometry, DetectionToEllipseExample) {
  // 100x100 box at the origin: height grows to 140 about y = 50.
  const Ellipse e = detection_to_ellipse({{0, 0, 100, 100}, 0.9});
  EXPECT_DOUBLE_EQ(e.cx, 50);
  EXPECT_DOUBLE_EQ(e.cy, 50);
  EXPECT_DOUBLE_EQ(e.ra, 70);
  EXPECT_DOUBLE_EQ(e.rb, 50);
  EXPECT_DOUBLE_EQ(e.angle, 0);
}

TEST(Geometry, EllipseContainsAndRotation) {
  const Ellipse e{0, 0, 10, 5, 0};
  EXPECT_TRUE(e.contains(0, 9.99));
  EXPECT_FALSE(e.contains(5.01, 0));
  Ellipse r = e;
  r.angle = std::numbers::pi / 2;  // major axis now horizontal
  EXPECT_TRUE(r.contains(9.99, 0));
  EXPECT_FALSE(r.contains(0, 5.01));
  const BoundingBox rb = r.bounds();
  EXPECT_NEAR(rb.w, 20, 1e-9);
  EXPECT_NEAR(rb.h, 10, 1e-9);
}

TEST(Geometry, PixelSpanUsesCenters) {
  EXPECT_EQ(pixel_span(0, 10), std::make_pair(0, 10));
  EXPECT_EQ(pixel_span(0.5, 1), std::make_pair(0, 1));   // center 0.5 included
  EXPECT_EQ(pixel_span(0.6, 1), std::make_pair(1, 2));
  const auto empty = pixel_span(2.2, 0.2);  // no center in [2.2, 2.4)
  EXPECT_EQ(empty.first, empty.second);
}

TEST(Geometry, PixelSpanMatchesCenterTest) {
  std::mt19937_64 g(5);
  for (int t = 0; t < 5000; ++t) {
    const double s = oracle::uniform(g, -5, 20), e = oracle::uniform(g, 0, 12);
    const auto [b, en] = pixel_span(s, e);
    for (int i = -10; i < 40; ++i) {
      const bool in = i + 0.5 >= s && i + 0.5 < s + e;
      EXPECT_EQ(in, i >= b && i < en) << s << " " << e << " " << i;
    }
  }
}

TEST(Geometry, RegionIouBoxesOnGridMatchesExact) {
  const Region a = BoundingBox{0, 0, 10, 10};
  const Region b = BoundingBox{5, 0, 10, 10};
  EXPECT_DOUBLE_EQ(region_iou(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(region_iou(a, a), 1.0);
}

TEST(Geometry, RegionIouEllipseSelfAndDisjoint) {
  const Region e = Ellipse{50, 50, 20, 10, 0.3};
  EXPECT_DOUBLE_EQ(region_iou(e, e), 1.0);
  EXPECT_DOUBLE_EQ(region_iou(e, Region{Ellipse{150, 50, 20, 10, 0}}), 0.0);
  EXPECT_THROW(region_iou(e, Region{BoundingBox{0.6, 0.6, 0.2, 0.2}}), std::domain_error);
}

TEST(Geometry, RegionIouSymmetricAndBounded) {
  std::mt19937_64 g(9);
  for (int t = 0; t < 300; ++t) {
    const Region a = Ellipse{oracle::uniform(g, 20, 60), oracle::uniform(g, 20, 60),
                             oracle::uniform(g, 3, 20), oracle::uniform(g, 3, 20),
                             oracle::uniform(g, -1.5, 1.5)};
    const Region b = BoundingBox{oracle::uniform(g, 0, 60), oracle::uniform(g, 0, 60),
                                 oracle::uniform(g, 2, 30), oracle::uniform(g, 2, 30)};
    const double v = region_iou(a, b);
    EXPECT_DOUBLE_EQ(v, region_iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Geometry, ClipBox) {
  EXPECT_EQ(clip_box({-5, -5, 10, 10}, 100, 100), (BoundingBox{0, 0, 5, 5}));
  EXPECT_FALSE(clip_box({100, 0, 10, 10}, 100, 100).has_value());
  EXPECT_EQ(clip_box({10, 10, 5, 5}, 100, 100), (BoundingBox{10, 10, 5, 5}));
}

TEST(Geometry, Validity) {
  EXPECT_TRUE((BoundingBox{0, 0, 1, 1}).valid());
  EXPECT_FALSE((BoundingBox{0, 0, 0, 1}).valid());
  EXPECT_FALSE((BoundingBox{0, 0, NAN, 1}).valid());
}
