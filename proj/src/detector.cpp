#include "osc/detector.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace osc {

std::vector<Detection> classify_proposals(const InferenceBackend& backend, const Image& image,
                                          std::span<const BoundingBox> boxes,
                                          double accept_score) {
  constexpr std::size_t kChunk = 64;  // bounds memory held by resized crops
  const int side = backend.descriptor().input_side;
  std::vector<double> scores;
  scores.reserve(boxes.size());
  for (std::size_t start = 0; start < boxes.size(); start += kChunk) {
    const std::size_t end = std::min(boxes.size(), start + kChunk);
    std::vector<Image> batch;
    batch.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) {
      const PixelRect r = pixel_rect(boxes[i], image.width(), image.height());
      if (r.empty())
        throw BackendError("proposal " + std::to_string(i) + " lies outside the image",
                           static_cast<int>(i));
      batch.push_back(resize_bicubic(crop(image, r), side, side));
    }
    std::vector<double> chunk;
    try {
      chunk = backend.infer_class_scores(batch);
    } catch (const BackendError& e) {
      const int index = e.index() < 0 ? -1 : static_cast<int>(start) + e.index();
      throw BackendError(std::string("classifying proposals: ") + e.what(), index);
    }
    if (chunk.size() != batch.size())
      throw BackendError("backend returned " + std::to_string(chunk.size()) + " scores for " +
                         std::to_string(batch.size()) + " proposals");
    scores.insert(scores.end(), chunk.begin(), chunk.end());
  }

  std::vector<Detection> out;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    if (scores[i] >= accept_score) out.push_back({boxes[i], scores[i]});
  return out;
}

std::vector<Detection> nms(std::span<const Detection> dets, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<bool> suppressed(dets.size(), false);
  std::vector<Detection> kept;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (!suppressed[j] && iou(dets[i].box, dets[j].box) > iou_threshold) suppressed[j] = true;
    }
  }
  return kept;
}

void validate(const DetectConfig& cfg) {
  if (cfg.osc_channel < 0) throw std::invalid_argument("osc_channel must be >= 0");
  if (!(cfg.nms_iou > 0.0 && cfg.nms_iou < 1.0))
    throw std::invalid_argument("nms_iou must be in (0, 1)");
  if (!(cfg.accept_score >= 0.0 && cfg.accept_score <= 1.0))
    throw std::invalid_argument("accept_score must be in [0, 1]");
  if (!(cfg.tiling.stride_ratio > 0.0 && cfg.tiling.stride_ratio <= 1.0))
    throw std::invalid_argument("tiling stride_ratio must be in (0, 1]");
  if (!(cfg.proposal.stride_ratio > 0.0 && cfg.proposal.stride_ratio <= 1.0))
    throw std::invalid_argument("proposal stride_ratio must be in (0, 1]");
  if (!(cfg.proposal.threshold > 0.0 && cfg.proposal.threshold <= 255.0))
    throw std::invalid_argument("proposal threshold must be in (0, 255]");
}

DetectionTrace run_detection(const InferenceBackend& backend, const Image& image,
                             const DetectConfig& cfg) {
  validate(cfg);
  if (image.empty()) throw std::invalid_argument("detect: empty image");
  DetectionTrace trace;
  trace.raw_heatmap = multires_heatmap(backend, image, cfg.osc_channel, cfg.tiling);
  trace.byte_heatmap = normalize_byte(trace.raw_heatmap);

  ProposalConfig pcfg = cfg.proposal;
  if (pcfg.window_sides.empty())
    pcfg.window_sides = default_proposal_windows(image.width(), image.height());
  trace.proposals = scan_proposals(trace.byte_heatmap, pcfg);

  std::vector<BoundingBox> boxes;
  boxes.reserve(trace.proposals.size());
  for (const auto& p : trace.proposals) boxes.push_back(p.box);
  trace.classified = classify_proposals(backend, image, boxes, cfg.accept_score);
  trace.detections = nms(trace.classified, cfg.nms_iou);
  return trace;
}

std::vector<Detection> detect(const InferenceBackend& backend, const Image& image,
                              const DetectConfig& cfg) {
  return run_detection(backend, image, cfg).detections;
}

}  // namespace osc
