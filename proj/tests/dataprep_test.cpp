#include <random>

#include <gtest/gtest.h>

#include "osc/dataprep.hpp"
#include "osc/synthetic_scene.hpp"
#include "support/oracles.hpp"

using namespace osc;

namespace {

Image noise_image(std::uint64_t seed, int w, int h) {
  std::mt19937_64 g(seed);
  Image img(w, h);
  for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(g() >> 56);
  return img;
}

bool center_in_any(int x, int y, const std::vector<BoundingBox>& boxes) {
  for (const auto& b : boxes)
    if (x + 0.5 >= b.x && x + 0.5 < b.right() && y + 0.5 >= b.y && y + 0.5 < b.bottom())
      return true;
  return false;
}

}  // namespace

TEST(MaskFaces, OutsidePixelsUntouchedInsideChanged) {
  std::mt19937_64 g(1);
  for (int t = 0; t < 50; ++t) {
    const Image img(120, 90, 100);
    std::vector<BoundingBox> boxes;
    for (int k = oracle::uniform_int(g, 0, 4); k > 0; --k)
      boxes.push_back({oracle::uniform(g, -10, 110), oracle::uniform(g, -10, 80),
                       oracle::uniform(g, 2, 40), oracle::uniform(g, 2, 40)});
    const Image out = mask_faces(img, boxes, t);
    long long inside = 0, changed = 0;
    for (int y = 0; y < 90; ++y)
      for (int x = 0; x < 120; ++x) {
        const bool in = center_in_any(x, y, boxes);
        for (int c = 0; c < 3; ++c) {
          if (!in) {
            ASSERT_EQ(out.at(x, y, c), img.at(x, y, c));
          }
          inside += in;
          changed += in && out.at(x, y, c) != 100;
        }
      }
    if (inside > 30) {
      EXPECT_GT(changed, inside * 9 / 10);
    }
    EXPECT_EQ(mask_faces(img, boxes, t), out);  // seeded
  }
}

TEST(Augment, FourVariantsOfSameSize) {
  const Image crop = noise_image(3, 40, 30);
  const auto out = augment_face(crop, {});
  ASSERT_EQ(out.size(), 4u);
  const AugmentKind kinds[] = {AugmentKind::original, AugmentKind::darkened, AugmentKind::blurred,
                               AugmentKind::occluded};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(out[i].kind, kinds[i]);
    EXPECT_EQ(out[i].image.width(), 40);
    EXPECT_EQ(out[i].image.height(), 30);
  }
  EXPECT_EQ(out[0].image, crop);
  EXPECT_STREQ(to_string(AugmentKind::blurred), "blurred");
}

TEST(Augment, DarkenScalesEveryByte) {
  const Image crop = noise_image(4, 8, 8);
  const Image d = darken(crop, 0.4);
  for (std::size_t i = 0; i < crop.bytes().size(); ++i)
    EXPECT_EQ(d.bytes()[i], static_cast<std::uint8_t>(std::lround(crop.bytes()[i] * 0.4)));
  EXPECT_THROW(darken(crop, 0.0), std::invalid_argument);
}

TEST(Augment, BoxBlurMatchesWindowMean) {
  const Image img = noise_image(5, 12, 9);
  const int r = 2;
  const Image b = box_blur(img, r);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 12; ++x)
      for (int c = 0; c < 3; ++c) {
        int s = 0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx)
            s += img.at(std::clamp(x + dx, 0, 11), std::clamp(y + dy, 0, 8), c);
        EXPECT_EQ(b.at(x, y, c), std::lround(s / 25.0));
      }
  EXPECT_EQ(box_blur(img, 0), img);
  const Image flat(10, 10, 42);
  EXPECT_EQ(box_blur(flat, 3), flat);
}

TEST(Augment, OcclusionCoversRequestedFraction) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const PixelRect r = occlusion_rect(60, 80, 0.25, seed);
    EXPECT_GE(r.x, 0);
    EXPECT_GE(r.y, 0);
    EXPECT_LE(r.x + r.w, 60);
    EXPECT_LE(r.y + r.h, 80);
    EXPECT_NEAR(r.w * r.h / (60.0 * 80.0), 0.25, 0.02);
    const double aspect = static_cast<double>(r.w) / r.h;
    EXPECT_GE(aspect, 0.75 - 0.05);
    EXPECT_LE(aspect, 4.0 / 3.0 + 0.05);
  }
  EXPECT_TRUE(occlusion_rect(60, 80, 0.0, 1).empty());
}

TEST(Negatives, HitTargetsWithinTolerance) {
  const std::vector<double> targets{0.0, 0.1, 0.2};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto scene = random_disc_scene(256, 256, 2, 30, 60, seed);
    const auto gts = scene.boxes();
    const auto samples = sample_negatives(scene.image, gts, targets, seed);
    ASSERT_EQ(samples.size(), gts.size() * targets.size());
    for (const auto& s : samples) {
      ASSERT_TRUE(s.found());
      double m = 0;
      for (const auto& gt : gts) m = std::max(m, oracle::box_iou(s.rect->to_box(), gt));
      EXPECT_NEAR(m, s.max_iou, 1e-12);
      EXPECT_LE(std::abs(m - s.target), s.target == 0.0 ? 0.0 : kNegativeIouTolerance);
      EXPECT_EQ(s.crop, crop(scene.image, *s.rect));
      EXPECT_EQ(s.rect->w, std::lround(gts[s.gt_index].w));
    }
  }
}

TEST(Negatives, InfeasibleTargetReportedEmpty) {
  // A box filling the image leaves no room for a disjoint crop.
  const Image img(50, 50);
  const std::vector<BoundingBox> gts{{0, 0, 50, 50}};
  const std::vector<double> targets{0.0};
  const auto s = sample_negatives(img, gts, targets, 1, 200);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_FALSE(s[0].found());
}

TEST(DoubleSize, ScalesAboutCenterAndClips) {
  EXPECT_EQ(double_size_rect({40, 40, 20, 20}, 200, 200), (PixelRect{30, 30, 40, 40}));
  EXPECT_EQ(double_size_rect({0, 0, 20, 20}, 200, 200), (PixelRect{0, 0, 30, 30}));
}

TEST(PadFace, FaceCenteredInBackgroundPatch) {
  const Image face(20, 10, 255);
  const Image bg = noise_image(9, 100, 100);
  const Image out = pad_face(face, bg, 0.5, 3);
  ASSERT_EQ(out.width(), 40);
  ASSERT_EQ(out.height(), 20);
  EXPECT_EQ(crop(out, {10, 5, 20, 10}), face);
  EXPECT_EQ(pad_face(face, bg, 0.5, 3), out);
  EXPECT_THROW(pad_face(face, Image(30, 30), 0.5, 3), std::invalid_argument);
}

TEST(Annotation, EllipsesContributeBounds) {
  Annotation a{"x", {BoundingBox{1, 2, 3, 4}, Ellipse{10, 10, 5, 3, 0}}};
  const auto boxes = a.boxes();
  ASSERT_EQ(boxes.size(), 2u);
  EXPECT_EQ(boxes[0], (BoundingBox{1, 2, 3, 4}));
  EXPECT_EQ(boxes[1], (BoundingBox{7, 5, 6, 10}));
}
