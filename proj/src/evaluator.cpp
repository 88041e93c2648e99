#include "osc/evaluator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace osc {

namespace {

// Total order used to break score ties, so results never depend on the
// order detections were supplied in.
auto region_key(const Region& r) {
  const BoundingBox b = region_bounds(r);
  const double angle = std::holds_alternative<Ellipse>(r) ? std::get<Ellipse>(r).angle : 0.0;
  return std::make_tuple(b.x, b.y, b.w, b.h, r.index(), angle);
}

bool before(const ScoredRegion& a, const ScoredRegion& b) {
  if (a.score != b.score) return a.score > b.score;
  return region_key(a.region) < region_key(b.region);
}

bool disjoint(const BoundingBox& a, const BoundingBox& b) {
  return a.right() <= b.x || b.right() <= a.x || a.bottom() <= b.y || b.bottom() <= a.y;
}

struct SortedImage {
  std::vector<ScoredRegion> dets;  // descending score, canonical tie order
  OverlapMatrix overlaps;
};

SortedImage prepare(const ImageEval& image) {
  SortedImage out{image.detections, {}};
  std::stable_sort(out.dets.begin(), out.dets.end(), before);
  std::vector<Region> regions;
  regions.reserve(out.dets.size());
  for (const auto& d : out.dets) regions.push_back(d.region);
  out.overlaps = overlap_matrix(regions, image.ground_truth, image.canvas);
  return out;
}

struct Tally {
  std::size_t tp = 0;
  std::size_t fp = 0;
  double overlap = 0.0;
};

Tally tally(const MatchResult& m, std::size_t dets) {
  Tally t;
  t.tp = m.pairs.size();
  t.fp = dets - t.tp;
  for (const auto& p : m.pairs) t.overlap += p.overlap;
  return t;
}

// Change in an image's tally when the threshold drops to `score`.
struct Event {
  double score;
  long long tp;
  long long fp;
  double overlap;
};

void collect_events(const ImageEval& image, const MatchPolicy& policy, std::vector<Event>& events,
                    std::size_t& total_gt) {
  total_gt += image.ground_truth.size();
  if (image.detections.empty()) return;
  const SortedImage s = prepare(image);
  Tally prev;
  std::size_t n = 0;
  while (n < s.dets.size()) {
    const double score = s.dets[n].score;
    while (n < s.dets.size() && s.dets[n].score == score) ++n;
    const Tally cur = tally(policy(s.overlaps.top(n), kMatchOverlap), n);
    events.push_back({score, static_cast<long long>(cur.tp) - static_cast<long long>(prev.tp),
                      static_cast<long long>(cur.fp) - static_cast<long long>(prev.fp),
                      cur.overlap - prev.overlap});
    prev = cur;
  }
}

EvalCurve sweep(std::vector<Event> events, std::size_t total_gt, Protocol protocol) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.score > b.score; });
  EvalCurve curve;
  long long tp = 0, fp = 0;
  double overlap = 0.0;
  for (std::size_t i = 0; i < events.size();) {
    const double score = events[i].score;
    for (; i < events.size() && events[i].score == score; ++i) {
      tp += events[i].tp;
      fp += events[i].fp;
      overlap += events[i].overlap;
    }
    const double hits = protocol == Protocol::discrete ? static_cast<double>(tp) : overlap;
    curve.points.push_back({score, static_cast<std::size_t>(fp),
                            total_gt ? hits / static_cast<double>(total_gt) : 0.0});
  }
  return curve;
}

}  // namespace

OverlapMatrix OverlapMatrix::top(std::size_t n) const {
  n = std::min(n, dets);
  return {n, gts, std::vector<double>(values.begin(), values.begin() + static_cast<long>(n * gts))};
}

double region_overlap(const Region& a, const Region& b, std::optional<Canvas> canvas) {
  if (const auto* ba = std::get_if<BoundingBox>(&a))
    if (const auto* bb = std::get_if<BoundingBox>(&b)) return iou(*ba, *bb);
  if (disjoint(region_bounds(a), region_bounds(b))) return 0.0;
  try {
    return region_iou(a, b, canvas);
  } catch (const std::domain_error&) {
    return 0.0;  // a region with no pixel overlaps nothing
  }
}

OverlapMatrix overlap_matrix(std::span<const Region> dets, std::span<const Region> gts,
                             std::optional<Canvas> canvas) {
  OverlapMatrix m{dets.size(), gts.size(), std::vector<double>(dets.size() * gts.size())};
  for (std::size_t d = 0; d < dets.size(); ++d)
    for (std::size_t g = 0; g < gts.size(); ++g)
      m.values[d * gts.size() + g] = region_overlap(dets[d], gts[g], canvas);
  return m;
}

MatchResult greedy_match(const OverlapMatrix& overlaps, double min_overlap) {
  MatchResult out;
  std::vector<bool> claimed(overlaps.gts, false);
  for (std::size_t d = 0; d < overlaps.dets; ++d) {
    std::size_t best = overlaps.gts;
    double best_overlap = min_overlap;
    for (std::size_t g = 0; g < overlaps.gts; ++g) {
      if (claimed[g]) continue;
      const double o = overlaps.at(d, g);
      if (o > best_overlap) {
        best = g;
        best_overlap = o;
      }
    }
    if (best == overlaps.gts) {
      out.unmatched_dets.push_back(d);
      continue;
    }
    claimed[best] = true;
    out.pairs.push_back({d, best, best_overlap});
  }
  for (std::size_t g = 0; g < overlaps.gts; ++g)
    if (!claimed[g]) out.unmatched_gts.push_back(g);
  return out;
}

MatchResult match_detections(std::span<const Region> dets, std::span<const Region> gts,
                             std::optional<Canvas> canvas, const MatchPolicy& policy) {
  return policy(overlap_matrix(dets, gts, canvas), kMatchOverlap);
}

FddbScore fddb_scores(std::span<const MatchResult> matches, std::size_t total_gt) {
  if (total_gt == 0) throw std::invalid_argument("fddb_scores: no ground truth");
  FddbScore s;
  for (const auto& m : matches) {
    s.discrete += m.pairs.size();
    for (const auto& p : m.pairs) s.continuous += p.overlap;
  }
  s.discrete_rate = static_cast<double>(s.discrete) / static_cast<double>(total_gt);
  s.continuous_rate = s.continuous / static_cast<double>(total_gt);
  return s;
}

const char* to_string(Protocol p) {
  return p == Protocol::discrete ? "discrete" : "continuous";
}

EvalCurve roc_curve(std::span<const ImageEval> images, Protocol protocol,
                    const MatchPolicy& policy) {
  std::vector<Event> events;
  std::size_t total_gt = 0;
  for (const auto& image : images) collect_events(image, policy, events, total_gt);
  return sweep(std::move(events), total_gt, protocol);
}

FoldCurves fold_roc_curves(std::span<const std::vector<ImageEval>> folds, Protocol protocol,
                           const MatchPolicy& policy) {
  FoldCurves out;
  std::vector<Event> all;
  std::size_t all_gt = 0;
  for (const auto& fold : folds) {
    std::vector<Event> events;
    std::size_t total_gt = 0;
    for (const auto& image : fold) collect_events(image, policy, events, total_gt);
    all.insert(all.end(), events.begin(), events.end());
    all_gt += total_gt;
    out.per_fold.push_back(sweep(std::move(events), total_gt, protocol));
  }
  out.combined = sweep(std::move(all), all_gt, protocol);
  return out;
}

std::vector<PrPoint> precision_recall(std::span<const ImageEval> images,
                                      const MatchPolicy& policy) {
  struct Hit {
    double score;
    std::size_t image;
    std::size_t rank;
    bool tp;
  };
  std::vector<Hit> hits;
  std::size_t total_gt = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    total_gt += images[i].ground_truth.size();
    if (images[i].detections.empty()) continue;
    const SortedImage s = prepare(images[i]);
    const MatchResult m = policy(s.overlaps, kMatchOverlap);
    std::vector<bool> tp(s.dets.size(), false);
    for (const auto& p : m.pairs) tp[p.det] = true;
    for (std::size_t r = 0; r < s.dets.size(); ++r) hits.push_back({s.dets[r].score, i, r, tp[r]});
  }
  std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& ia = images[a.image].image_id;
    const auto& ib = images[b.image].image_id;
    if (ia != ib) return ia < ib;
    return std::tie(a.image, a.rank) < std::tie(b.image, b.rank);
  });
  std::vector<PrPoint> out;
  out.reserve(hits.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    tp += hits[k].tp ? 1 : 0;
    out.push_back({hits[k].score,
                   total_gt ? static_cast<double>(tp) / static_cast<double>(total_gt) : 0.0,
                   static_cast<double>(tp) / static_cast<double>(k + 1)});
  }
  return out;
}

double pascal_ap(std::span<const ImageEval> images, const MatchPolicy& policy) {
  const std::size_t total_gt =
      std::accumulate(images.begin(), images.end(), std::size_t{0},
                      [](std::size_t n, const ImageEval& e) { return n + e.ground_truth.size(); });
  if (total_gt == 0) throw std::invalid_argument("pascal_ap: no ground truth");
  const auto pr = precision_recall(images, policy);
  std::vector<double> best(pr.size());
  double running = 0.0;
  for (std::size_t k = pr.size(); k-- > 0;) {
    running = std::max(running, pr[k].precision);
    best[k] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < pr.size(); ++k) {
    ap += (pr[k].recall - prev_recall) * best[k];
    prev_recall = pr[k].recall;
  }
  return ap;
}

Ellipse detection_to_ellipse(const Detection& d) {
  return inscribe_ellipse(extend_box_vertical(d.box, kDefaultVerticalExtension));
}

}  // namespace osc
