#include "osc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace osc {

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

bool Ellipse::contains(double px, double py) const {
  const double dx = px - cx;
  const double dy = py - cy;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double u = dx * c + dy * s;
  const double v = -dx * s + dy * c;
  return (u * u) / (rb * rb) + (v * v) / (ra * ra) <= 1.0;
}

BoundingBox Ellipse::bounds() const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double hx = std::sqrt(rb * rb * c * c + ra * ra * s * s);
  const double hy = std::sqrt(rb * rb * s * s + ra * ra * c * c);
  return {cx - hx, cy - hy, 2.0 * hx, 2.0 * hy};
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

BoundingBox extend_box_vertical(const BoundingBox& b, double factor) {
  if (!(factor >= 0.0)) throw std::invalid_argument("extension factor must be >= 0");
  const double h = b.h * (1.0 + factor);
  return {b.x, b.center_y() - h / 2.0, b.w, h};
}

Ellipse inscribe_ellipse(const BoundingBox& b) {
  return {b.center_x(), b.center_y(), b.h / 2.0, b.w / 2.0, 0.0};
}

std::pair<int, int> pixel_span(double start, double extent) {
  // i + 0.5 >= start  <=>  i >= start - 0.5
  const double lo = std::ceil(start - 0.5);
  const double hi = std::ceil(start + extent - 0.5);
  constexpr double kLimit = 1e9;
  const int b = static_cast<int>(std::clamp(lo, -kLimit, kLimit));
  const int e = static_cast<int>(std::clamp(hi, -kLimit, kLimit));
  return {b, std::max(b, e)};
}

bool contains_pixel(const Region& r, int px, int py) {
  const double x = px + 0.5;
  const double y = py + 0.5;
  if (const auto* b = std::get_if<BoundingBox>(&r)) {
    return x >= b->x && x < b->right() && y >= b->y && y < b->bottom();
  }
  return std::get<Ellipse>(r).contains(x, y);
}

BoundingBox region_bounds(const Region& r) {
  if (const auto* b = std::get_if<BoundingBox>(&r)) return *b;
  return std::get<Ellipse>(r).bounds();
}

namespace {

struct PixelWindow {
  int x0, y0, x1, y1;
  bool empty() const { return x0 >= x1 || y0 >= y1; }
};

PixelWindow window_of(const BoundingBox& b, const Canvas& canvas) {
  auto [x0, x1] = pixel_span(b.x, b.w);
  auto [y0, y1] = pixel_span(b.y, b.h);
  // An ellipse boundary pixel can sit one step outside the span of its
  // real-valued bounds; widen by one and let contains_pixel decide.
  return {std::max(0, x0 - 1), std::max(0, y0 - 1), std::min(canvas.width, x1 + 1),
          std::min(canvas.height, y1 + 1)};
}

PixelWindow intersect(const PixelWindow& a, const PixelWindow& b) {
  return {std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
          std::min(a.y1, b.y1)};
}

template <typename Pred>
long long count_pixels(const PixelWindow& win, Pred&& pred) {
  long long n = 0;
  for (int y = win.y0; y < win.y1; ++y)
    for (int x = win.x0; x < win.x1; ++x)
      if (pred(x, y)) ++n;
  return n;
}

}  // namespace

long long rasterized_area(const Region& r, const Canvas& canvas) {
  const PixelWindow win = window_of(region_bounds(r), canvas);
  if (win.empty()) return 0;
  return count_pixels(win, [&](int x, int y) { return contains_pixel(r, x, y); });
}

double region_iou(const Region& a, const Region& b, std::optional<Canvas> canvas) {
  const BoundingBox ba = region_bounds(a);
  const BoundingBox bb = region_bounds(b);
  Canvas grid;
  if (canvas) {
    grid = *canvas;
  } else {
    const double right = std::max(ba.right(), bb.right());
    const double bottom = std::max(ba.bottom(), bb.bottom());
    grid = {static_cast<int>(std::ceil(std::max(0.0, right))) + 1,
            static_cast<int>(std::ceil(std::max(0.0, bottom))) + 1};
  }
  const PixelWindow wa = window_of(ba, grid);
  const PixelWindow wb = window_of(bb, grid);
  const long long area_a = wa.empty() ? 0 : count_pixels(wa, [&](int x, int y) {
    return contains_pixel(a, x, y);
  });
  const long long area_b = wb.empty() ? 0 : count_pixels(wb, [&](int x, int y) {
    return contains_pixel(b, x, y);
  });
  if (area_a == 0 || area_b == 0)
    throw std::domain_error("region_iou: region covers no pixel of the canvas");
  const PixelWindow wi = intersect(wa, wb);
  const long long inter = wi.empty() ? 0 : count_pixels(wi, [&](int x, int y) {
    return contains_pixel(a, x, y) && contains_pixel(b, x, y);
  });
  return static_cast<double>(inter) / static_cast<double>(area_a + area_b - inter);
}

std::optional<BoundingBox> clip_box(const BoundingBox& b, double width, double height) {
  const double x0 = std::max(0.0, b.x);
  const double y0 = std::max(0.0, b.y);
  const double x1 = std::min(width, b.right());
  const double y1 = std::min(height, b.bottom());
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

}  // namespace osc
