#pragma once

#include <vector>

#include "osc/geometry.hpp"
#include "osc/heatmap.hpp"

namespace osc {

inline constexpr double kDefaultProposalThreshold = 80.0;

struct ProposalConfig {
  /// Byte intensity a window's face-score must exceed.
  double threshold = kDefaultProposalThreshold;
  /// Square window sides; must be non-empty when scanning.
  std::vector<int> window_sides;
  double stride_ratio = 0.25;
  std::size_t max_proposals = 2000;
};

struct Proposal {
  BoundingBox box;
  double score = 0.0;
};

/// Geometric ladder of sides from 32 px growing by sqrt(2), capped at the
/// smaller image dimension. Images smaller than 32 px get one full-size side.
std::vector<int> default_proposal_windows(int width, int height);

/// Every square window (each side, edge-clamped sliding positions) whose
/// face-score is strictly above the threshold, best first, truncated at
/// max_proposals. Ties keep enumeration order (side, row, column). Sides
/// larger than the heatmap are skipped.
std::vector<Proposal> scan_proposals(const Heatmap& h, const ProposalConfig& cfg);

}  // namespace osc
