#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osc/detector.hpp"
#include "osc/geometry.hpp"

namespace osc {

/// A detection must overlap a ground truth strictly more than this to match.
inline constexpr double kMatchOverlap = 0.5;

struct ScoredRegion {
  Region region;
  double score = 0.0;
};

/// Detections and ground truth of one image. The canvas, when known, bounds
/// the rasterization used for ellipse overlaps.
struct ImageEval {
  std::string image_id;
  std::vector<ScoredRegion> detections;
  std::vector<Region> ground_truth;
  std::optional<Canvas> canvas;
};

/// Row-major detection x ground-truth overlap ratios.
struct OverlapMatrix {
  std::size_t dets = 0;
  std::size_t gts = 0;
  std::vector<double> values;

  double at(std::size_t d, std::size_t g) const { return values[d * gts + g]; }
  /// The first n detection rows.
  OverlapMatrix top(std::size_t n) const;
};

/// Box pairs use exact IoU; anything involving an ellipse is rasterized on
/// pixel centers. Regions covering no pixel overlap nothing.
double region_overlap(const Region& a, const Region& b, std::optional<Canvas> canvas = std::nullopt);

OverlapMatrix overlap_matrix(std::span<const Region> dets, std::span<const Region> gts,
                             std::optional<Canvas> canvas = std::nullopt);

struct MatchPair {
  std::size_t det = 0;
  std::size_t gt = 0;
  double overlap = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_dets;
  std::vector<std::size_t> unmatched_gts;
};

/// Matching policy over an overlap matrix whose rows are ordered by
/// descending detection score.
using MatchPolicy = std::function<MatchResult(const OverlapMatrix&, double min_overlap)>;

/// Each detection in row order claims the unclaimed ground truth with the
/// highest overlap (lowest index on ties) if that overlap exceeds
/// min_overlap; otherwise it stays unmatched.
MatchResult greedy_match(const OverlapMatrix& overlaps, double min_overlap = kMatchOverlap);

/// Detections must already be sorted by descending score.
MatchResult match_detections(std::span<const Region> dets, std::span<const Region> gts,
                             std::optional<Canvas> canvas = std::nullopt,
                             const MatchPolicy& policy = greedy_match);

struct FddbScore {
  std::size_t discrete = 0;  // matched detections
  double continuous = 0.0;   // sum of matched overlaps
  double discrete_rate = 0.0;
  double continuous_rate = 0.0;
};

/// Throws std::invalid_argument when total_gt is 0.
FddbScore fddb_scores(std::span<const MatchResult> matches, std::size_t total_gt);

enum class Protocol { discrete, continuous };

const char* to_string(Protocol p);

struct CurvePoint {
  double threshold = 0.0;
  std::size_t fp_count = 0;
  double tpr = 0.0;
};

/// One point per distinct detection score, thresholds descending. Each point
/// counts the detections scoring >= threshold.
struct EvalCurve {
  std::vector<CurvePoint> points;
};

/// Sweeps every distinct detection score. With no ground truth at all the
/// true positive rate is reported as 0.
EvalCurve roc_curve(std::span<const ImageEval> images, Protocol protocol,
                    const MatchPolicy& policy = greedy_match);

struct FoldCurves {
  std::vector<EvalCurve> per_fold;
  EvalCurve combined;  // TP and FP counts summed over folds
};

FoldCurves fold_roc_curves(std::span<const std::vector<ImageEval>> folds, Protocol protocol,
                           const MatchPolicy& policy = greedy_match);

struct PrPoint {
  double threshold = 0.0;  // score of the detection just added
  double recall = 0.0;
  double precision = 0.0;
};

/// Precision/recall after each detection in global descending-score order.
std::vector<PrPoint> precision_recall(std::span<const ImageEval> images,
                                      const MatchPolicy& policy = greedy_match);

/// Area under the precision/recall curve where each precision is replaced by
/// the best precision at any equal or higher recall. Throws
/// std::invalid_argument when there is no ground truth.
double pascal_ap(std::span<const ImageEval> images, const MatchPolicy& policy = greedy_match);

/// Upright ellipse inscribed in the detection box grown vertically by 40%.
Ellipse detection_to_ellipse(const Detection& d);

}  // namespace osc
