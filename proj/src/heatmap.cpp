#include "osc/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <stdexcept>

#include "osc/parallel.hpp"
#include "resample.hpp"

namespace osc {

Heatmap::Heatmap(int width, int height, HeatmapScale scale, float fill)
    : Heatmap(width, height,
              std::vector<float>(static_cast<std::size_t>(std::max(0, width)) *
                                     std::max(0, height),
                                 fill),
              scale) {}

Heatmap::Heatmap(int width, int height, std::vector<float> values, HeatmapScale scale)
    : width_(width), height_(height), scale_(scale), values_(std::move(values)) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("heatmap dimensions must be > 0");
  if (values_.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("heatmap value count does not match dimensions");
}

Heatmap channel_heatmap(const FeatureMaps& maps, int channel) {
  if (channel < 0 || channel >= maps.channels)
    throw std::out_of_range("channel " + std::to_string(channel) + " not in feature maps with " +
                            std::to_string(maps.channels) + " channels");
  const auto src = maps.channel(channel);
  return Heatmap(maps.width, maps.height, std::vector<float>(src.begin(), src.end()));
}

Heatmap resize_bicubic(const Heatmap& src, int target_w, int target_h) {
  if (target_w < 1 || target_h < 1) throw std::invalid_argument("resize target must be >= 1");
  if (src.width() < 2 || src.height() < 2)
    throw std::invalid_argument("bicubic resize needs a source of at least 2x2");
  auto out = detail::resize_plane(src.values(), src.width(), src.height(), target_w, target_h);
  const float hi = src.scale() == HeatmapScale::byte ? 255.0f : INFINITY;
  for (float& v : out) v = std::clamp(v, 0.0f, hi);
  return Heatmap(target_w, target_h, std::move(out), src.scale());
}

double face_score(const Heatmap& h, const BoundingBox& box) {
  const PixelRect r = pixel_rect(box, h.width(), h.height());
  if (r.empty()) throw std::domain_error("face_score: box covers no heatmap pixel");
  double sum = 0.0;
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x) sum += h.at(x, y);
  return sum / (static_cast<double>(r.w) * r.h);
}

namespace {

std::vector<std::uint8_t> box_mask(int width, int height, std::span<const BoundingBox> boxes) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height, 0);
  for (const auto& b : boxes) {
    const PixelRect r = pixel_rect(b, width, height);
    for (int y = r.y; y < r.y + r.h; ++y)
      std::fill_n(mask.begin() + static_cast<std::size_t>(y) * width + r.x, r.w, 1);
  }
  return mask;
}

// Mean over unmasked pixels; nullopt when everything is masked.
std::optional<double> unmasked_mean(std::span<const float> values,
                                    const std::vector<std::uint8_t>& mask) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) continue;
    sum += values[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// Vectorized reduction; the summation order differs from a plain loop only
// in rounding.
double plain_sum(const float* v, int n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (int x = 0; x < n; ++x) acc += v[x];
  return acc;
}

using RowIntervals = std::vector<std::vector<std::pair<int, int>>>;

// resize_bicubic followed by face_score and the outside sum, fused so the
// upsampled map is never stored. Returns the mean face-score over `rects`
// and the clamped sum outside `covered`. Reductions are vectorized and the
// outside sum is a row total minus the covered intervals, so results match
// the unfused path to rounding only.
#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
__attribute__((target_clones("avx2", "default")))
#endif
std::pair<double, double> fused_channel_scores(detail::PlaneResampler& upsample,
                                               std::span<const float> channel,
                                               const std::vector<PixelRect>& rects,
                                               const RowIntervals& covered) {
  const int side = upsample.width();
  upsample.load(channel);
  std::vector<float> row(side);
  std::vector<double> box_sums(rects.size(), 0.0);
  double outside_sum = 0.0;
  for (int y = 0; y < upsample.height(); ++y) {
    upsample.row(y, row.data(), 0.0f);
    double row_outside = plain_sum(row.data(), side);
    for (const auto& [x0, x1] : covered[y]) row_outside -= plain_sum(row.data() + x0, x1 - x0);
    outside_sum += row_outside;
    for (std::size_t k = 0; k < rects.size(); ++k) {
      const PixelRect& r = rects[k];
      if (y < r.y || y >= r.y + r.h) continue;
      box_sums[k] += plain_sum(row.data() + r.x, r.w);
    }
  }
  double inside = 0.0;
  for (std::size_t k = 0; k < rects.size(); ++k)
    inside += box_sums[k] / (static_cast<double>(rects[k].w) * rects[k].h);
  return {inside / static_cast<double>(rects.size()), outside_sum};
}

}  // namespace

double outside_score(const Heatmap& h, std::span<const BoundingBox> boxes) {
  const auto mean = unmasked_mean(h.values(), box_mask(h.width(), h.height(), boxes));
  if (!mean) throw std::domain_error("outside_score: boxes cover the whole heatmap");
  return *mean;
}

std::vector<ChannelScore> rank_channels(std::span<const AnnotatedImage> dataset,
                                        const InferenceBackend& backend, int jobs) {
  const int side = backend.descriptor().input_side;

  struct PerImage {
    bool used = false;
    bool has_outside = false;
    std::vector<double> inside;
    std::vector<double> outside;
  };
  std::vector<PerImage> results(dataset.size());

  auto score_image = [&](std::size_t i) {
    const AnnotatedImage& item = dataset[i];
    if (item.boxes.empty() || item.image.empty()) return;
    const double sx = static_cast<double>(side) / item.image.width();
    const double sy = static_cast<double>(side) / item.image.height();
    std::vector<BoundingBox> boxes;
    for (const auto& b : item.boxes) {
      const BoundingBox scaled{b.x * sx, b.y * sy, b.w * sx, b.h * sy};
      if (!pixel_rect(scaled, side, side).empty()) boxes.push_back(scaled);
    }
    if (boxes.empty()) return;

    const FeatureMaps maps =
        backend.infer_features(item.image.width() == side && item.image.height() == side
                                   ? item.image
                                   : resize_bicubic(item.image, side, side));
    std::vector<PixelRect> rects;
    for (const auto& b : boxes) rects.push_back(pixel_rect(b, side, side));
    // Per row, the column intervals covered by the union of the boxes.
    RowIntervals covered(side);
    {
      const auto mask = box_mask(side, side, boxes);
      for (int y = 0; y < side; ++y) {
        const std::uint8_t* m = mask.data() + static_cast<std::size_t>(y) * side;
        for (int x = 0; x < side;) {
          if (!m[x]) { ++x; continue; }
          const int start = x;
          while (x < side && m[x]) ++x;
          covered[y].emplace_back(start, x);
        }
      }
    }
    std::size_t outside_n = static_cast<std::size_t>(side) * side;
    for (const auto& row : covered)
      for (const auto& [x0, x1] : row) outside_n -= static_cast<std::size_t>(x1 - x0);

    PerImage& out = results[i];
    out.inside.resize(maps.channels);
    out.outside.resize(maps.channels);
    out.has_outside = outside_n > 0;

    detail::PlaneResampler upsample(maps.width, maps.height, side, side);
    for (int c = 0; c < maps.channels; ++c) {
      const auto [inside, outside] = fused_channel_scores(upsample, maps.channel(c), rects, covered);
      out.inside[c] = inside;
      out.outside[c] = outside_n ? std::max(0.0, outside) / static_cast<double>(outside_n) : 0.0;
    }
    out.used = true;
  };
  parallel_for(dataset.size(), backend.descriptor().concurrency_safe ? jobs : 1, score_image);

  std::vector<double> inside, outside;
  std::size_t n_inside = 0, n_outside = 0;
  for (const auto& r : results) {
    if (!r.used) continue;
    if (inside.empty()) {
      inside.assign(r.inside.size(), 0.0);
      outside.assign(r.inside.size(), 0.0);
    } else if (r.inside.size() != inside.size()) {
      throw BackendError("backend returned a varying channel count");
    }
    for (std::size_t c = 0; c < inside.size(); ++c) inside[c] += r.inside[c];
    ++n_inside;
    if (r.has_outside) {
      for (std::size_t c = 0; c < outside.size(); ++c) outside[c] += r.outside[c];
      ++n_outside;
    }
  }
  if (n_inside == 0) throw std::invalid_argument("rank_channels: no annotated image in dataset");

  std::vector<ChannelScore> scores(inside.size());
  for (std::size_t c = 0; c < inside.size(); ++c) {
    scores[c].channel = static_cast<int>(c);
    scores[c].inside = inside[c] / static_cast<double>(n_inside);
    scores[c].outside = n_outside ? outside[c] / static_cast<double>(n_outside) : 0.0;
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ChannelScore& a, const ChannelScore& b) { return a.inside > b.inside; });
  return scores;
}

std::vector<int> default_tile_windows(int width, int height) {
  const int m = std::min(width, height);
  std::vector<int> sides;
  for (int s : {m, m / 2, m / 4})
    if (s >= 8 && std::find(sides.begin(), sides.end(), s) == sides.end()) sides.push_back(s);
  if (sides.empty()) sides.push_back(m);
  return sides;
}

int window_step(int side, double stride_ratio) {
  if (!(stride_ratio > 0.0 && stride_ratio <= 1.0))
    throw std::invalid_argument("stride ratio must be in (0, 1]");
  return std::max(1, static_cast<int>(std::floor(side * stride_ratio)));
}

std::vector<int> window_offsets(int length, int side, int step) {
  std::vector<int> offsets;
  if (side > length) return offsets;
  for (int o = 0; o + side <= length; o += step) offsets.push_back(o);
  if (offsets.back() != length - side) offsets.push_back(length - side);
  return offsets;
}

std::vector<PixelRect> tile_image(int width, int height, std::span<const int> window_sides,
                                  double stride_ratio) {
  if (window_sides.empty()) throw std::invalid_argument("tile_image: empty window list");
  if (width <= 0 || height <= 0) throw std::invalid_argument("tile_image: empty image");
  std::vector<PixelRect> rects{{0, 0, width, height}};
  for (int s : window_sides) {
    if (s < 1 || s > std::min(width, height))
      throw std::invalid_argument("tile_image: window side " + std::to_string(s) +
                                  " does not fit the image");
    const int step = window_step(s, stride_ratio);
    const auto xs = window_offsets(width, s, step);
    const auto ys = window_offsets(height, s, step);
    for (int y : ys)
      for (int x : xs) {
        const PixelRect r{x, y, s, s};
        if (std::find(rects.begin(), rects.end(), r) == rects.end()) rects.push_back(r);
      }
  }
  return rects;
}

Heatmap merge_max(std::span<const TilePlacement> tiles, int canvas_w, int canvas_h) {
  if (tiles.empty()) throw std::invalid_argument("merge_max: no tiles");
  bool all_byte = true;
  Heatmap canvas(canvas_w, canvas_h);
  for (const auto& t : tiles) {
    const PixelRect& r = t.rect;
    if (r.empty() || r.x < 0 || r.y < 0 || r.x + r.w > canvas_w || r.y + r.h > canvas_h)
      throw std::invalid_argument("merge_max: tile outside canvas");
    all_byte = all_byte && t.heatmap.scale() == HeatmapScale::byte;
    const bool fits = t.heatmap.width() == r.w && t.heatmap.height() == r.h;
    const Heatmap resized = fits ? Heatmap{} : resize_bicubic(t.heatmap, r.w, r.h);
    const Heatmap& h = fits ? t.heatmap : resized;
    for (int y = 0; y < r.h; ++y)
      for (int x = 0; x < r.w; ++x) {
        float& dst = canvas.at(r.x + x, r.y + y);
        dst = std::max(dst, h.at(x, y));
      }
  }
  if (!all_byte) return canvas;
  auto values = canvas.values();
  return Heatmap(canvas_w, canvas_h, std::vector<float>(values.begin(), values.end()),
                 HeatmapScale::byte);
}

Heatmap normalize_byte(const Heatmap& h) {
  const auto v = h.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double range = static_cast<double>(*hi_it) - lo;
  std::vector<float> out(v.size(), 0.0f);
  if (range > 0.0)
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = static_cast<float>((v[i] - lo) / range * 255.0);
  return Heatmap(h.width(), h.height(), std::move(out), HeatmapScale::byte);
}

Heatmap quantize(const Heatmap& h, int levels) {
  if (levels < 2) throw std::invalid_argument("quantize: levels must be >= 2");
  if (h.scale() != HeatmapScale::byte)
    throw std::invalid_argument("quantize: heatmap must be byte-scale");
  const auto v = h.values();
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const int bin = std::min(levels - 1, static_cast<int>(std::floor(v[i] * levels / 256.0)));
    out[i] = static_cast<float>(std::round(bin * 255.0 / (levels - 1)));
  }
  return Heatmap(h.width(), h.height(), std::move(out), HeatmapScale::byte);
}

std::vector<TilePlacement> tile_responses(const InferenceBackend& backend, const Image& image,
                                          int channel, std::span<const PixelRect> rects) {
  const int side = backend.descriptor().input_side;
  std::vector<TilePlacement> tiles;
  tiles.reserve(rects.size());
  for (const auto& r : rects) {
    Image sub = (r.x == 0 && r.y == 0 && r.w == image.width() && r.h == image.height())
                    ? image
                    : crop(image, r);
    if (sub.width() != side || sub.height() != side) sub = resize_bicubic(sub, side, side);
    tiles.push_back({r, channel_heatmap(backend.infer_features(sub), channel)});
  }
  return tiles;
}

Heatmap multires_heatmap(const InferenceBackend& backend, const Image& image, int channel,
                         const TilingConfig& tiling) {
  const std::vector<int> windows = tiling.windows.empty()
                                       ? default_tile_windows(image.width(), image.height())
                                       : tiling.windows;
  const auto rects = tile_image(image.width(), image.height(), windows, tiling.stride_ratio);
  const auto tiles = tile_responses(backend, image, channel, rects);
  return merge_max(tiles, image.width(), image.height());
}

Heatmap single_window_heatmap(const InferenceBackend& backend, const Image& image, int channel) {
  const PixelRect full{0, 0, image.width(), image.height()};
  const auto tiles = tile_responses(backend, image, channel, std::span(&full, 1));
  return merge_max(tiles, image.width(), image.height());
}

}  // namespace osc
