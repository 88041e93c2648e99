#pragma once

#include <vector>

#include "osc/backend.hpp"
#include "osc/heatmap.hpp"
#include "osc/proposals.hpp"

namespace osc {

struct Detection {
  BoundingBox box;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct DetectConfig {
  /// Index of the object specific channel in the backend's feature layer.
  int osc_channel = 0;
  TilingConfig tiling;
  /// Proposal windows left empty resolve to default_proposal_windows().
  ProposalConfig proposal;
  double nms_iou = 0.3;
  double accept_score = 0.5;
};

/// Everything the pipeline produced for one image.
struct DetectionTrace {
  Heatmap raw_heatmap;   // merged multi-resolution map
  Heatmap byte_heatmap;  // normalize_byte(raw_heatmap)
  std::vector<Proposal> proposals;
  std::vector<Detection> classified;  // accepted, before NMS
  std::vector<Detection> detections;  // final
};

/// Crops each box (clipped to the image), resizes it to the backend input
/// side and scores the whole list as one batch. Boxes scoring below
/// `accept_score` are dropped; the rest keep input order. A backend failure
/// is rethrown as BackendError carrying the offending box index.
std::vector<Detection> classify_proposals(const InferenceBackend& backend, const Image& image,
                                          std::span<const BoundingBox> boxes,
                                          double accept_score = 0.5);

/// Greedy non-maximum suppression: visit detections by score (ties by input
/// order), keep one unless it overlaps an already kept detection with
/// IoU > iou_threshold. Output is sorted by score descending.
std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold);

DetectionTrace run_detection(const InferenceBackend& backend, const Image& image,
                             const DetectConfig& cfg);

std::vector<Detection> detect(const InferenceBackend& backend, const Image& image,
                              const DetectConfig& cfg);

/// Throws std::invalid_argument when a field is outside its valid range.
void validate(const DetectConfig& cfg);

}  // namespace osc
