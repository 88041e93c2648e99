#pragma once

#include <span>
#include <vector>

#include "osc/backend.hpp"
#include "osc/geometry.hpp"
#include "osc/image.hpp"

namespace osc {

enum class HeatmapScale { raw, byte };

/// Single-channel non-negative intensity grid, row-major. Byte-scale maps
/// hold values in [0, 255].
class Heatmap {
 public:
  Heatmap() = default;
  Heatmap(int width, int height, HeatmapScale scale = HeatmapScale::raw, float fill = 0.0f);
  Heatmap(int width, int height, std::vector<float> values,
          HeatmapScale scale = HeatmapScale::raw);

  int width() const { return width_; }
  int height() const { return height_; }
  HeatmapScale scale() const { return scale_; }

  float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  float& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  HeatmapScale scale_ = HeatmapScale::raw;
  std::vector<float> values_;
};

struct TilePlacement {
  PixelRect rect;
  Heatmap heatmap;
};

struct ChannelScore {
  int channel = 0;
  double inside = 0.0;
  double outside = 0.0;
};

struct AnnotatedImage {
  Image image;
  std::vector<BoundingBox> boxes;
};

struct TilingConfig {
  /// Square window sides in pixels; empty selects default_tile_windows().
  std::vector<int> windows;
  double stride_ratio = 0.5;
};

Heatmap channel_heatmap(const FeatureMaps& maps, int channel);

/// Separable Catmull-Rom bicubic resize; negative overshoot clamps to 0 and
/// byte-scale maps also clamp at 255.
Heatmap resize_bicubic(const Heatmap& src, int target_w, int target_h);

/// Mean intensity over the pixels whose centers lie in the box, after
/// clipping to the map. Throws std::domain_error when no pixel is covered.
double face_score(const Heatmap& h, const BoundingBox& box);

/// Mean intensity over pixels outside every box. Throws std::domain_error
/// when the boxes cover the whole map.
double outside_score(const Heatmap& h, std::span<const BoundingBox> boxes);

/// Per-channel (inside, outside) face-scores averaged over the dataset,
/// sorted by inside score descending (ties by channel index). Each channel
/// map is upsampled to the network input size first. Images without boxes
/// are skipped; images whose boxes cover the whole frame contribute to the
/// inside average only. Images not at the input size are resized to it and
/// their boxes scaled accordingly.
std::vector<ChannelScore> rank_channels(std::span<const AnnotatedImage> dataset,
                                        const InferenceBackend& backend, int jobs = 1);

/// {m, m/2, m/4} for m = min(width, height), dropping sides below 8.
std::vector<int> default_tile_windows(int width, int height);

/// Window step for a square side and stride ratio: floor(side * ratio), >= 1.
int window_step(int side, double stride_ratio);

/// Offsets 0, step, 2*step, ... that fit, plus a final offset clamped to
/// `length - side` so the axis is fully covered.
std::vector<int> window_offsets(int length, int side, int step);

/// Sliding-window sub-images for every side, plus the full image rect.
/// Duplicates are removed; order is full image first, then by side
/// (as given), row, column.
std::vector<PixelRect> tile_image(int width, int height, std::span<const int> window_sides,
                                  double stride_ratio = 0.5);

/// Per-pixel maximum over all tiles, each resized to its rect first.
/// Uncovered pixels are 0.
Heatmap merge_max(std::span<const TilePlacement> tiles, int canvas_w, int canvas_h);

/// Linear min-max map to [0, 255]; a constant map becomes all zeros.
Heatmap normalize_byte(const Heatmap& h);

/// Uniform gray-level quantization of a byte-scale map into `levels` bins.
Heatmap quantize(const Heatmap& h, int levels = 8);

/// Runs the backend on every rect (cropped and resized to the input side)
/// and returns the selected channel's response placed at that rect.
std::vector<TilePlacement> tile_responses(const InferenceBackend& backend, const Image& image,
                                          int channel, std::span<const PixelRect> rects);

/// Multi-resolution raw heatmap of the image: tile, infer, merge by max.
Heatmap multires_heatmap(const InferenceBackend& backend, const Image& image, int channel,
                         const TilingConfig& tiling = {});

/// Heatmap from the whole image as a single window.
Heatmap single_window_heatmap(const InferenceBackend& backend, const Image& image, int channel);

}  // namespace osc
