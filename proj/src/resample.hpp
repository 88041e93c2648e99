#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace osc::detail {

// Catmull-Rom (Keys a = -0.5) cubic convolution kernel.
inline double cubic_kernel(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// Four taps per destination sample, source indices clamped to the edge.
struct AxisTaps {
  static constexpr int kTaps = 4;
  std::vector<int> index;
  std::vector<float> weight;

  AxisTaps(int src_len, int dst_len) : index(dst_len * kTaps), weight(dst_len * kTaps) {
    const double scale = static_cast<double>(src_len) / dst_len;
    for (int d = 0; d < dst_len; ++d) {
      const double s = (d + 0.5) * scale - 0.5;
      const double base = std::floor(s);
      const double frac = s - base;
      for (int k = 0; k < kTaps; ++k) {
        const int off = k - 1;
        const int i = std::clamp(static_cast<int>(base) + off, 0, src_len - 1);
        index[d * kTaps + k] = i;
        weight[d * kTaps + k] = static_cast<float>(cubic_kernel(frac - off));
      }
    }
  }
};

// Bicubic resize from a fixed source size to a fixed target size. Output
// rows are produced one at a time so callers can consume them without
// materializing the full plane.
class PlaneResampler {
 public:
  PlaneResampler(int sw, int sh, int dw, int dh)
      : sw_(sw), sh_(sh), dw_(dw), dh_(dh), tx_(sw, dw), ty_(sh, dh),
        tmp_(static_cast<std::size_t>(sh) * dw) {}

  int width() const { return dw_; }
  int height() const { return dh_; }

  // Horizontal pass over every source row.
  void load(std::span<const float> src) {
    for (int y = 0; y < sh_; ++y) {
      const float* row = src.data() + static_cast<std::size_t>(y) * sw_;
      float* out = tmp_.data() + static_cast<std::size_t>(y) * dw_;
      for (int x = 0; x < dw_; ++x) {
        const int* idx = &tx_.index[x * AxisTaps::kTaps];
        const float* w = &tx_.weight[x * AxisTaps::kTaps];
        out[x] = row[idx[0]] * w[0] + row[idx[1]] * w[1] + row[idx[2]] * w[2] +
                 row[idx[3]] * w[3];
      }
    }
  }

  // Vertical pass for output row y of the last loaded source, optionally
  // clamped from below.
  void row(int y, float* out, float floor = -INFINITY) const {
    const int* idx = &ty_.index[y * AxisTaps::kTaps];
    const float* w = &ty_.weight[y * AxisTaps::kTaps];
    const float* __restrict r0 = tmp_.data() + static_cast<std::size_t>(idx[0]) * dw_;
    const float* __restrict r1 = tmp_.data() + static_cast<std::size_t>(idx[1]) * dw_;
    const float* __restrict r2 = tmp_.data() + static_cast<std::size_t>(idx[2]) * dw_;
    const float* __restrict r3 = tmp_.data() + static_cast<std::size_t>(idx[3]) * dw_;
    const float w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3];
    float* __restrict dst = out;
    const int n = dw_;
    for (int x = 0; x < n; ++x)
      dst[x] = std::max(r0[x] * w0 + r1[x] * w1 + r2[x] * w2 + r3[x] * w3, floor);
  }

 private:
  int sw_, sh_, dw_, dh_;
  AxisTaps tx_, ty_;
  std::vector<float> tmp_;
};

// Resizes a single-channel float plane; no clamping of the result.
inline std::vector<float> resize_plane(std::span<const float> src, int sw, int sh, int dw,
                                       int dh) {
  PlaneResampler r(sw, sh, dw, dh);
  r.load(src);
  std::vector<float> dst(static_cast<std::size_t>(dw) * dh);
  for (int y = 0; y < dh; ++y) r.row(y, dst.data() + static_cast<std::size_t>(y) * dw);
  return dst;
}

}  // namespace osc::detail
