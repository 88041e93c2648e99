#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "osc/geometry.hpp"
#include "osc/image.hpp"

namespace osc {

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;

  BoundingBox box() const { return {cx - radius, cy - radius, 2 * radius, 2 * radius}; }
};

struct SceneStyle {
  int background = 60;
  int foreground = 200;
  /// Uniform per-pixel noise amplitude in gray levels (0 = clean).
  int noise = 6;
};

struct DiscScene {
  Image image;
  std::vector<Disc> discs;

  std::vector<BoundingBox> boxes() const;
};

/// Bright anti-aliased discs on a darker, lightly noisy background.
DiscScene render_disc_scene(int width, int height, std::span<const Disc> discs,
                            std::uint64_t seed, const SceneStyle& style = {});

/// `count` discs with diameters in [min_diameter, max_diameter], fully
/// inside the frame and separated by at least one radius of clear space.
/// Throws std::runtime_error if the layout cannot be placed.
DiscScene random_disc_scene(int width, int height, int count, double min_diameter,
                            double max_diameter, std::uint64_t seed,
                            const SceneStyle& style = {});

}  // namespace osc
