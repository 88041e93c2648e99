#include "osc/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace osc {

std::vector<int> default_proposal_windows(int width, int height) {
  constexpr int kSmallest = 32;
  const int m = std::min(width, height);
  if (m < kSmallest) return {m};
  std::vector<int> sides;
  for (double s = kSmallest; std::lround(s) <= m; s *= std::sqrt(2.0)) {
    const int side = static_cast<int>(std::lround(s));
    if (sides.empty() || sides.back() != side) sides.push_back(side);
  }
  return sides;
}

std::vector<Proposal> scan_proposals(const Heatmap& h, const ProposalConfig& cfg) {
  if (cfg.window_sides.empty()) throw std::invalid_argument("scan_proposals: no window sides");
  if (!(cfg.threshold > 0.0 && cfg.threshold <= 255.0))
    throw std::invalid_argument("scan_proposals: threshold must be in (0, 255]");

  const int w = h.width();
  const int ht = h.height();
  std::vector<Proposal> out;
  for (int side : cfg.window_sides) {
    if (side < 1 || side > std::min(w, ht)) continue;
    const int step = window_step(side, cfg.stride_ratio);
    const auto xs = window_offsets(w, side, step);
    const auto ys = window_offsets(ht, side, step);
    for (int y : ys) {
      for (int x : xs) {
        const BoundingBox box{double(x), double(y), double(side), double(side)};
        const double score = face_score(h, box);
        if (score > cfg.threshold)
          out.push_back({box, score});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Proposal& a, const Proposal& b) { return a.score > b.score; });
  if (out.size() > cfg.max_proposals) out.resize(cfg.max_proposals);
  return out;
}

}  // namespace osc
