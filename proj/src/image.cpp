#include "osc/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resample.hpp"

namespace osc {

PixelRect pixel_rect(const BoundingBox& box, int width, int height) {
  auto [x0, x1] = pixel_span(box.x, box.w);
  auto [y0, y1] = pixel_span(box.y, box.h);
  x0 = std::clamp(x0, 0, width);
  x1 = std::clamp(x1, 0, width);
  y0 = std::clamp(y0, 0, height);
  y1 = std::clamp(y1, 0, height);
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

Image::Image(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  data_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
}

Image crop(const Image& image, const PixelRect& rect) {
  if (rect.empty() || rect.x < 0 || rect.y < 0 || rect.x + rect.w > image.width() ||
      rect.y + rect.h > image.height())
    throw std::out_of_range("crop rectangle outside image");
  Image out(rect.w, rect.h);
  const auto src = image.bytes();
  auto dst = out.bytes();
  const std::size_t row_bytes = static_cast<std::size_t>(rect.w) * Image::kChannels;
  for (int y = 0; y < rect.h; ++y) {
    const std::size_t s =
        (static_cast<std::size_t>(rect.y + y) * image.width() + rect.x) * Image::kChannels;
    std::copy_n(src.begin() + s, row_bytes, dst.begin() + y * row_bytes);
  }
  return out;
}

void paste(Image& dst, const Image& src, int x, int y) {
  if (x < 0 || y < 0 || x + src.width() > dst.width() || y + src.height() > dst.height())
    throw std::out_of_range("paste target outside image");
  for (int yy = 0; yy < src.height(); ++yy)
    for (int xx = 0; xx < src.width(); ++xx)
      for (int c = 0; c < Image::kChannels; ++c) dst.at(x + xx, y + yy, c) = src.at(xx, yy, c);
}

Image resize_bicubic(const Image& image, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("resize target must be >= 1");
  if (image.empty()) throw std::invalid_argument("resize of empty image");
  if (width == image.width() && height == image.height()) return image;
  const int sw = image.width();
  const int sh = image.height();
  Image out(width, height);
  std::vector<float> plane(static_cast<std::size_t>(sw) * sh);
  for (int c = 0; c < Image::kChannels; ++c) {
    for (int y = 0; y < sh; ++y)
      for (int x = 0; x < sw; ++x) plane[static_cast<std::size_t>(y) * sw + x] = image.at(x, y, c);
    const auto r = detail::resize_plane(plane, sw, sh, width, height);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const float v = r[static_cast<std::size_t>(y) * width + x];
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
  }
  return out;
}

std::vector<float> to_gray(const Image& image) {
  std::vector<float> g(static_cast<std::size_t>(image.width()) * image.height());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      g[static_cast<std::size_t>(y) * image.width() + x] =
          static_cast<float>((0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
                              0.114 * image.at(x, y, 2)) /
                             255.0);
  return g;
}

}  // namespace osc
