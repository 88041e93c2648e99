#pragma once

// Brute-force reference implementations and random generators shared by the
// unit tests and the acceptance runner. They are written from the definitions
// and deliberately avoid the library's helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "osc/detector.hpp"
#include "osc/heatmap.hpp"
#include "osc/proposals.hpp"

namespace oracle {

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline osc::Heatmap random_heatmap(std::mt19937_64& g, int w, int h, double hi = 255.0,
                                   bool integral = false,
                                   osc::HeatmapScale scale = osc::HeatmapScale::byte) {
  std::vector<float> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) {
    const double r = uniform(g, 0.0, hi);
    x = static_cast<float>(integral ? std::floor(r) : r);
  }
  return osc::Heatmap(w, h, std::move(v), scale);
}

// Mean over pixels whose centers (i + 0.5, j + 0.5) lie in [x, x+w) x [y, y+h).
// Returns NaN when none does.
inline double face_score(const osc::Heatmap& h, const osc::BoundingBox& b) {
  double sum = 0.0;
  long long n = 0;
  for (int j = 0; j < h.height(); ++j) {
    const double cy = j + 0.5;
    if (cy < b.y || cy >= b.y + b.h) continue;
    for (int i = 0; i < h.width(); ++i) {
      const double cx = i + 0.5;
      if (cx < b.x || cx >= b.x + b.w) continue;
      sum += h.at(i, j);
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::nan("");
}

inline double box_iou(const osc::BoundingBox& a, const osc::BoundingBox& b) {
  const double iw = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

// Keeps a detection iff no higher-ranked kept detection overlaps it by more
// than the threshold. Rank is score, then input position.
inline std::vector<osc::Detection> nms(const std::vector<osc::Detection>& dets, double thr) {
  const std::size_t n = dets.size();
  auto ranks_before = [&](std::size_t a, std::size_t b) {
    return dets[a].score > dets[b].score || (dets[a].score == dets[b].score && a < b);
  };
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pos = 0;
    while (pos < order.size() && ranks_before(order[pos], i)) ++pos;
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), i);
  }
  std::vector<osc::Detection> kept;
  for (std::size_t i : order) {
    bool keep = true;
    for (const auto& k : kept)
      if (box_iou(k.box, dets[i].box) > thr) keep = false;
    if (keep) kept.push_back(dets[i]);
  }
  return kept;
}

// Every square placement of every side on a sliding grid with floor step
// (at least 1) plus the edge-flush position, filtered by score > threshold.
inline std::vector<osc::Proposal> proposals(const osc::Heatmap& h, const osc::ProposalConfig& cfg) {
  struct Cand {
    osc::Proposal p;
    std::size_t seq;
  };
  std::vector<Cand> all;
  std::size_t seq = 0;
  for (int side : cfg.window_sides) {
    if (side < 1 || side > h.width() || side > h.height()) continue;
    const int step = std::max(1, static_cast<int>(side * cfg.stride_ratio));
    auto offsets = [&](int len) {
      std::vector<int> o;
      for (int v = 0; v <= len - side; v += step) o.push_back(v);
      if (o.back() != len - side) o.push_back(len - side);
      return o;
    };
    for (int y : offsets(h.height()))
      for (int x : offsets(h.width())) {
        double sum = 0.0;
        for (int j = y; j < y + side; ++j)
          for (int i = x; i < x + side; ++i) sum += h.at(i, j);
        const double score = sum / (static_cast<double>(side) * side);
        if (score > cfg.threshold)
          all.push_back({{{double(x), double(y), double(side), double(side)}, score}, seq});
        ++seq;
      }
  }
  std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) {
    return a.p.score != b.p.score ? a.p.score > b.p.score : a.seq < b.seq;
  });
  std::vector<osc::Proposal> out;
  for (std::size_t i = 0; i < all.size() && i < cfg.max_proposals; ++i) out.push_back(all[i].p);
  return out;
}

}  // namespace oracle
