#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osc/geometry.hpp"

namespace osc {

/// Integer pixel rectangle, used for crops and tile placements.
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  BoundingBox to_box() const { return {double(x), double(y), double(w), double(h)}; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Pixels whose centers fall inside the box, clipped to a width x height grid.
PixelRect pixel_rect(const BoundingBox& box, int width, int height);

/// 8-bit interleaved RGB image, row-major.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int width, int height, std::uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  std::uint8_t& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  std::span<std::uint8_t> bytes() { return data_; }
  std::span<const std::uint8_t> bytes() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Copies a sub-rectangle; the rect must lie inside the image.
Image crop(const Image& image, const PixelRect& rect);

/// Writes `src` into `dst` with its top-left corner at (x, y); must fit.
void paste(Image& dst, const Image& src, int x, int y);

/// Separable Catmull-Rom bicubic resize, edge-clamped, rounded to 8 bits.
Image resize_bicubic(const Image& image, int width, int height);

/// ITU-R 601 luma in [0,1], row-major.
std::vector<float> to_gray(const Image& image);

}  // namespace osc
