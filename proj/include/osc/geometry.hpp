#pragma once

#include <optional>
#include <utility>
#include <variant>

namespace osc {

/// Axis-aligned region in pixel coordinates, origin at the top-left corner.
/// Coordinates are real-valued; w and h are strictly positive.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }

  bool valid() const;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Ellipse with semi-axis `ra` along y and `rb` along x before rotation.
/// `angle` rotates the ellipse (radians, clockwise on screen since y points
/// down). Ellipses built from detections are always upright (angle 0).
struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double ra = 0.0;
  double rb = 0.0;
  double angle = 0.0;

  bool contains(double px, double py) const;
  BoundingBox bounds() const;
  friend bool operator==(const Ellipse&, const Ellipse&) = default;
};

using Region = std::variant<BoundingBox, Ellipse>;

/// Integer pixel grid the regions are rasterized on.
struct Canvas {
  int width = 0;
  int height = 0;
};

inline constexpr double kDefaultVerticalExtension = 0.40;

double iou(const BoundingBox& a, const BoundingBox& b);

/// Grows the box height by (1 + factor) keeping its center fixed.
BoundingBox extend_box_vertical(const BoundingBox& b,
                                double factor = kDefaultVerticalExtension);

/// Largest upright ellipse inside the box.
Ellipse inscribe_ellipse(const BoundingBox& b);

/// Half-open range [begin, end) of integer pixel indices whose centers
/// (i + 0.5) fall in [start, start + extent).
std::pair<int, int> pixel_span(double start, double extent);

bool contains_pixel(const Region& r, int px, int py);
BoundingBox region_bounds(const Region& r);

/// Number of pixel centers of the canvas covered by the region.
long long rasterized_area(const Region& r, const Canvas& canvas);

/// IoU of two regions measured by counting covered pixel centers. Without a
/// canvas the grid spans the union of both regions' bounds, clipped at the
/// origin. Throws std::domain_error if either region covers no pixel.
double region_iou(const Region& a, const Region& b,
                  std::optional<Canvas> canvas = std::nullopt);

/// Intersection of a box with [0,w)x[0,h); nullopt when empty.
std::optional<BoundingBox> clip_box(const BoundingBox& b, double width,
                                    double height);

}  // namespace osc
