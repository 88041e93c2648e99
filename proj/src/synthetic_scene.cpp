#include "osc/synthetic_scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "osc/synthetic_backend.hpp"

namespace osc {

namespace {

constexpr double kEdgeSoftness = 0.5;
constexpr double kEdgeReach = 20.0;

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

}  // namespace

std::vector<BoundingBox> DiscScene::boxes() const {
  std::vector<BoundingBox> out;
  out.reserve(discs.size());
  for (const auto& d : discs) out.push_back(d.box());
  return out;
}

DiscScene render_disc_scene(int width, int height, std::span<const Disc> discs,
                            std::uint64_t seed, const SceneStyle& style) {
  DiscScene scene{Image(width, height), {discs.begin(), discs.end()}};
  std::mt19937_64 gen(seed);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double cover = 0.0;
      for (const auto& d : discs) {
        const double dx = x + 0.5 - d.cx;
        const double dy = y + 0.5 - d.cy;
        // Beyond this distance the edge contributes less than 1e-17.
        const double reach = d.radius + kEdgeReach;
        if (dx * dx + dy * dy > reach * reach) continue;
        cover = std::max(cover, soft_disc(std::hypot(dx, dy), d.radius, kEdgeSoftness));
      }
      double v = style.background + cover * (style.foreground - style.background);
      if (style.noise > 0) v += uniform(gen, -style.noise, style.noise);
      const auto byte = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      for (int c = 0; c < Image::kChannels; ++c) scene.image.at(x, y, c) = byte;
    }
  }
  return scene;
}

DiscScene random_disc_scene(int width, int height, int count, double min_diameter,
                            double max_diameter, std::uint64_t seed, const SceneStyle& style) {
  std::mt19937_64 gen(seed);
  std::vector<Disc> discs;
  constexpr int kAttempts = 10000;
  for (int attempt = 0; attempt < kAttempts && static_cast<int>(discs.size()) < count; ++attempt) {
    const double r = uniform(gen, min_diameter, max_diameter) / 2.0;
    const double margin = r + 2.0;
    if (2 * margin >= width || 2 * margin >= height) continue;
    const Disc d{uniform(gen, margin, width - margin), uniform(gen, margin, height - margin), r};
    const bool clear = std::all_of(discs.begin(), discs.end(), [&](const Disc& o) {
      const double gap = std::hypot(d.cx - o.cx, d.cy - o.cy) - d.radius - o.radius;
      return gap >= std::max(d.radius, o.radius);
    });
    if (clear) discs.push_back(d);
  }
  if (static_cast<int>(discs.size()) < count)
    throw std::runtime_error("random_disc_scene: cannot place the requested discs");
  return render_disc_scene(width, height, discs, gen(), style);
}

}  // namespace osc
