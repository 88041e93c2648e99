#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osc/geometry.hpp"
#include "osc/image.hpp"

namespace osc {

/// Ground truth for one image: boxes and/or (possibly rotated) ellipses.
struct Annotation {
  std::string image_id;
  std::vector<Region> regions;

  /// Boxes as given, ellipses replaced by their bounding boxes.
  std::vector<BoundingBox> boxes() const;
};

struct AugmentSpec {
  double darken_gain = 0.4;
  int blur_radius = 3;
  double occlusion_fraction = 0.25;
  std::uint64_t seed = 0;
};

enum class AugmentKind { original, darkened, blurred, occluded };

const char* to_string(AugmentKind kind);

struct AugmentedCrop {
  AugmentKind kind;
  Image image;
};

inline constexpr double kNegativeIouTolerance = 0.02;
inline constexpr int kNegativeAttempts = 10000;
inline constexpr double kDoubleSizeScale = 2.0;

/// Negative crop aimed at a target IoU against the ground truth.
struct NegativeSample {
  double target = 0.0;
  std::size_t gt_index = 0;
  std::optional<PixelRect> rect;  // empty when the target was infeasible
  double max_iou = 0.0;
  Image crop;

  bool found() const { return rect.has_value(); }
};

/// Replaces every pixel inside any box with independent uniform noise per
/// channel; pixels outside all boxes are untouched.
Image mask_faces(const Image& image, std::span<const BoundingBox> boxes, std::uint64_t seed);

/// Rectangle covering about `fraction` of a width x height crop, with a
/// seeded aspect ratio in [3/4, 4/3] and position. Empty for fraction 0.
PixelRect occlusion_rect(int width, int height, double fraction, std::uint64_t seed);

/// {original, darkened, blurred, occluded}, all the size of `crop`.
std::vector<AugmentedCrop> augment_face(const Image& crop, const AugmentSpec& spec);

/// Box blur with a (2r+1)^2 window, edge-clamped; r = 0 returns the input.
Image box_blur(const Image& image, int radius);

/// Per-pixel multiply by gain, rounded.
Image darken(const Image& image, double gain);

/// For every ground-truth box and every target, rejection-samples a crop of
/// that box's size whose maximum IoU over all ground-truth boxes lies within
/// +-0.02 of the target (exactly 0 when the target is 0). Entries that
/// exhaust `attempts` are returned without a rect.
std::vector<NegativeSample> sample_negatives(const Image& image,
                                             std::span<const BoundingBox> gt_boxes,
                                             std::span<const double> iou_targets,
                                             std::uint64_t seed,
                                             int attempts = kNegativeAttempts);

/// The box scaled by 2 about its center, clipped to the image.
PixelRect double_size_rect(const BoundingBox& gt_box, int width, int height);
Image double_size_crop(const Image& image, const BoundingBox& gt_box);

/// Face crop centered on a patch of the background with a border of
/// round(pad_fraction * side) on each side. The patch position inside the
/// background is seeded. Throws std::invalid_argument if the background is
/// smaller than the padded size.
Image pad_face(const Image& face, const Image& background, double pad_fraction,
               std::uint64_t seed);

}  // namespace osc
