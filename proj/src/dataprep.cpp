#include "osc/dataprep.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace osc {

namespace {

std::uint8_t random_byte(std::mt19937_64& gen) { return static_cast<std::uint8_t>(gen() >> 56); }

int random_int(std::mt19937_64& gen, int lo, int hi) {  // inclusive
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(gen() % span);
}

double random_unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

void fill_noise(Image& image, const PixelRect& r, std::mt19937_64& gen) {
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x)
      for (int c = 0; c < Image::kChannels; ++c) image.at(x, y, c) = random_byte(gen);
}

double max_iou(const BoundingBox& b, std::span<const BoundingBox> gts) {
  double best = 0.0;
  for (const auto& g : gts) best = std::max(best, iou(b, g));
  return best;
}

}  // namespace

std::vector<BoundingBox> Annotation::boxes() const {
  std::vector<BoundingBox> out;
  out.reserve(regions.size());
  for (const auto& r : regions) out.push_back(region_bounds(r));
  return out;
}

const char* to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::original: return "original";
    case AugmentKind::darkened: return "darkened";
    case AugmentKind::blurred: return "blurred";
    case AugmentKind::occluded: return "occluded";
  }
  return "unknown";
}

Image mask_faces(const Image& image, std::span<const BoundingBox> boxes, std::uint64_t seed) {
  Image out = image;
  std::mt19937_64 gen(seed);
  for (const auto& b : boxes) fill_noise(out, pixel_rect(b, image.width(), image.height()), gen);
  return out;
}

PixelRect occlusion_rect(int width, int height, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw std::invalid_argument("occlusion fraction must be in [0, 1)");
  if (fraction == 0.0 || width <= 0 || height <= 0) return {};
  std::mt19937_64 gen(seed);
  const double area = fraction * width * height;
  const double aspect = 0.75 + random_unit(gen) * (4.0 / 3.0 - 0.75);
  int w = std::clamp(static_cast<int>(std::lround(std::sqrt(area * aspect))), 1, width);
  int h = std::clamp(static_cast<int>(std::lround(area / w)), 1, height);
  w = std::clamp(static_cast<int>(std::lround(area / h)), 1, width);
  return {random_int(gen, 0, width - w), random_int(gen, 0, height - h), w, h};
}

Image darken(const Image& image, double gain) {
  if (!(gain > 0.0 && gain <= 1.0)) throw std::invalid_argument("darken gain must be in (0, 1]");
  Image out = image;
  for (auto& v : out.bytes()) v = static_cast<std::uint8_t>(std::lround(v * gain));
  return out;
}

Image box_blur(const Image& image, int radius) {
  if (radius < 0) throw std::invalid_argument("blur radius must be >= 0");
  if (radius == 0 || image.empty()) return image;
  const int w = image.width();
  const int h = image.height();
  const int n = 2 * radius + 1;
  // Horizontal sums, then vertical sums; one division at the end.
  std::vector<int> horiz(static_cast<std::size_t>(w) * h * Image::kChannels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < Image::kChannels; ++c) {
        int s = 0;
        for (int k = -radius; k <= radius; ++k) s += image.at(std::clamp(x + k, 0, w - 1), y, c);
        horiz[(static_cast<std::size_t>(y) * w + x) * Image::kChannels + c] = s;
      }
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < Image::kChannels; ++c) {
        int s = 0;
        for (int k = -radius; k <= radius; ++k)
          s += horiz[(static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w + x) *
                         Image::kChannels + c];
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(static_cast<double>(s) / (n * n)));
      }
  return out;
}

std::vector<AugmentedCrop> augment_face(const Image& crop, const AugmentSpec& spec) {
  std::vector<AugmentedCrop> out;
  out.reserve(4);
  out.push_back({AugmentKind::original, crop});
  out.push_back({AugmentKind::darkened, darken(crop, spec.darken_gain)});
  out.push_back({AugmentKind::blurred, box_blur(crop, spec.blur_radius)});
  Image occluded = crop;
  const PixelRect r = occlusion_rect(crop.width(), crop.height(), spec.occlusion_fraction, spec.seed);
  std::mt19937_64 gen(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  fill_noise(occluded, r, gen);
  out.push_back({AugmentKind::occluded, std::move(occluded)});
  return out;
}

std::vector<NegativeSample> sample_negatives(const Image& image,
                                             std::span<const BoundingBox> gt_boxes,
                                             std::span<const double> iou_targets,
                                             std::uint64_t seed, int attempts) {
  std::mt19937_64 gen(seed);
  std::vector<NegativeSample> out;
  const int iw = image.width();
  const int ih = image.height();
  for (std::size_t gi = 0; gi < gt_boxes.size(); ++gi) {
    const BoundingBox& gt = gt_boxes[gi];
    const int w = std::max(1, static_cast<int>(std::lround(gt.w)));
    const int h = std::max(1, static_cast<int>(std::lround(gt.h)));
    for (double target : iou_targets) {
      NegativeSample sample;
      sample.target = target;
      sample.gt_index = gi;
      if (w > iw || h > ih) {
        out.push_back(std::move(sample));
        continue;
      }
      for (int a = 0; a < attempts; ++a) {
        int x, y;
        if (target <= 0.0) {
          x = random_int(gen, 0, iw - w);
          y = random_int(gen, 0, ih - h);
        } else {
          // Positive targets need partial overlap: stay within one box
          // size of the ground truth.
          const int gx = static_cast<int>(std::lround(gt.x));
          const int gy = static_cast<int>(std::lround(gt.y));
          x = random_int(gen, gx - w, gx + w);
          y = random_int(gen, gy - h, gy + h);
          if (x < 0 || y < 0 || x + w > iw || y + h > ih) continue;
        }
        const PixelRect r{x, y, w, h};
        const double m = max_iou(r.to_box(), gt_boxes);
        const bool ok = target <= 0.0 ? m == 0.0
                                      : std::abs(m - target) <= kNegativeIouTolerance;
        if (!ok) continue;
        sample.rect = r;
        sample.max_iou = m;
        sample.crop = crop(image, r);
        break;
      }
      out.push_back(std::move(sample));
    }
  }
  return out;
}

PixelRect double_size_rect(const BoundingBox& gt_box, int width, int height) {
  const double w = gt_box.w * kDoubleSizeScale;
  const double h = gt_box.h * kDoubleSizeScale;
  const BoundingBox scaled{gt_box.center_x() - w / 2.0, gt_box.center_y() - h / 2.0, w, h};
  return pixel_rect(scaled, width, height);
}

Image double_size_crop(const Image& image, const BoundingBox& gt_box) {
  return crop(image, double_size_rect(gt_box, image.width(), image.height()));
}

Image pad_face(const Image& face, const Image& background, double pad_fraction,
               std::uint64_t seed) {
  if (!(pad_fraction >= 0.0)) throw std::invalid_argument("pad fraction must be >= 0");
  const int bx = static_cast<int>(std::lround(pad_fraction * face.width()));
  const int by = static_cast<int>(std::lround(pad_fraction * face.height()));
  if (bx == 0 && by == 0) return face;
  const int w = face.width() + 2 * bx;
  const int h = face.height() + 2 * by;
  if (background.width() < w || background.height() < h)
    throw std::invalid_argument("pad_face: background smaller than the padded output");
  std::mt19937_64 gen(seed);
  const int ox = random_int(gen, 0, background.width() - w);
  const int oy = random_int(gen, 0, background.height() - h);
  Image out = crop(background, {ox, oy, w, h});
  paste(out, face, bx, by);
  return out;
}

}  // namespace osc
