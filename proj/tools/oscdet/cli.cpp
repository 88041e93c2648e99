#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "osc/dataprep.hpp"
#include "osc/evaluator.hpp"
#include "osc/formats.hpp"
#include "osc/image_io.hpp"
#include "osc/parallel.hpp"

namespace oscdet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (run seed, item, purpose).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t item, std::uint64_t purpose) {
  return splitmix64(splitmix64(base ^ splitmix64(item)) ^ purpose);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_png_at(const fs::path& path, const osc::Image& image) {
  fs::create_directories(path.parent_path());
  osc::write_png(path, image);
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::vector<osc::Annotation> load_annotations(const std::string& path, const std::string& format) {
  if (path.empty()) throw ConfigError("an annotation file (--annotations) is required");
  if (!fs::exists(path)) throw ConfigError("annotation file not found: " + path);
  return format == "fddb" ? osc::read_fddb_ellipses(path) : osc::read_annotations_jsonl(path);
}

std::vector<osc::BoundingBox> visible_boxes(const osc::Annotation& a, const osc::Image& image) {
  std::vector<osc::BoundingBox> out;
  for (const auto& b : a.boxes())
    if (!osc::pixel_rect(b, image.width(), image.height()).empty()) out.push_back(b);
  return out;
}

osc::Image load_annotated_image(const std::string& root, const std::string& image_id) {
  const std::string path = find_image(root, image_id);
  if (path.empty()) throw osc::ImageIoError("no image file for id '" + image_id + "'");
  return osc::read_image(path);
}

}  // namespace

std::string image_id_for(const std::string& path, const std::string& root) {
  fs::path p(path);
  if (!root.empty()) {
    const fs::path rel = p.lexically_normal().lexically_relative(fs::path(root).lexically_normal());
    if (!rel.empty() && *rel.begin() != "..") p = rel;
  }
  return p.replace_extension().generic_string();
}

std::string find_image(const std::string& root, const std::string& image_id) {
  const fs::path base = root.empty() ? fs::path(image_id) : fs::path(root) / image_id;
  if (is_image_file(base) && fs::is_regular_file(base)) return base.string();
  for (const char* ext : {".png", ".jpg", ".jpeg", ".PNG", ".JPG", ".JPEG"}) {
    fs::path candidate = base;
    candidate += ext;
    if (fs::is_regular_file(candidate)) return candidate.string();
  }
  return {};
}

// ---------------------------------------------------------------- prepare-data

namespace {

struct PreparedImage {
  std::vector<json> records;
  std::vector<json> infeasible;
  std::optional<std::string> error;
};

std::optional<osc::Image> find_background(const osc::Image& image,
                                          std::span<const osc::BoundingBox> boxes, int w, int h,
                                          std::uint64_t seed) {
  if (w > image.width() || h > image.height()) return std::nullopt;
  std::mt19937_64 gen(seed);
  constexpr int kAttempts = 1000;
  for (int a = 0; a < kAttempts; ++a) {
    const int x = static_cast<int>(gen() % static_cast<std::uint64_t>(image.width() - w + 1));
    const int y = static_cast<int>(gen() % static_cast<std::uint64_t>(image.height() - h + 1));
    const osc::BoundingBox r{static_cast<double>(x), static_cast<double>(y), static_cast<double>(w),
                             static_cast<double>(h)};
    const bool clear = std::all_of(boxes.begin(), boxes.end(),
                                   [&](const osc::BoundingBox& b) { return osc::iou(r, b) == 0.0; });
    if (clear) return osc::crop(image, {x, y, w, h});
  }
  return std::nullopt;
}

PreparedImage prepare_image(const RunConfig& cfg, const osc::Annotation& ann, std::size_t index) {
  PreparedImage result;
  const std::string source = find_image(cfg.dataset.images_root, ann.image_id);
  if (source.empty()) {
    result.error = "no image file for id '" + ann.image_id + "'";
    return result;
  }
  osc::Image image;
  try {
    image = osc::read_image(source);
  } catch (const std::exception& e) {
    result.error = e.what();
    return result;
  }
  const fs::path out(cfg.out);
  const auto boxes = visible_boxes(ann, image);
  auto record = [&](const std::string& stage, const std::string& label, const std::string& op,
                    const fs::path& rel, const osc::Image& img, std::optional<std::size_t> box) {
    write_png_at(out / rel, img);
    json r{{"stage", stage}, {"label", label}, {"op", op},      {"path", rel.generic_string()},
           {"image_id", ann.image_id}, {"source", source}};
    if (box) r["box_index"] = *box;
    result.records.push_back(std::move(r));
  };

  const osc::Image masked = osc::mask_faces(image, boxes, derive_seed(cfg.seed, index, 1));
  record("osc", "masked", "masked", fs::path("osc") / "masked" / (ann.image_id + ".png"), masked,
         std::nullopt);

  const auto negatives = osc::sample_negatives(image, boxes, cfg.prepare.iou_targets,
                                               derive_seed(cfg.seed, index, 2));
  const std::uint64_t boxes_seed = derive_seed(cfg.seed, index, 3);
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const std::string stem = ann.image_id + "_b" + std::to_string(k) + "_";
    const fs::path face_dir = fs::path("classifier") / "face";
    const fs::path nonface_dir = fs::path("classifier") / "nonface";
    const osc::PixelRect rect = osc::pixel_rect(boxes[k], image.width(), image.height());
    const osc::Image face = osc::crop(image, rect);

    osc::AugmentSpec spec{cfg.prepare.darken_gain, cfg.prepare.blur_radius,
                          cfg.prepare.occlusion_fraction, derive_seed(boxes_seed, k, 1)};
    for (const auto& aug : osc::augment_face(face, spec)) {
      const std::string op = osc::to_string(aug.kind);
      record("classifier", "face", op, face_dir / (stem + op + ".png"), aug.image, k);
    }

    for (const auto& neg : negatives) {
      if (neg.gt_index != k) continue;
      const std::string op = "iou_" + osc::format_number(neg.target);
      if (!neg.found()) {
        result.infeasible.push_back({{"image_id", ann.image_id}, {"box_index", k}, {"target", neg.target}});
        spdlog::warn("{}: box {}: no crop found for IoU target {}", ann.image_id, k, neg.target);
        continue;
      }
      record("classifier", "nonface", op, nonface_dir / (stem + op + ".png"), neg.crop, k);
      result.records.back()["iou"] = neg.max_iou;
    }

    record("classifier", "nonface", "double_size", nonface_dir / (stem + "double_size.png"),
           osc::double_size_crop(image, boxes[k]), k);

    const int bx = static_cast<int>(std::lround(cfg.prepare.pad_fraction * face.width()));
    const int by = static_cast<int>(std::lround(cfg.prepare.pad_fraction * face.height()));
    const int pw = face.width() + 2 * bx;
    const int ph = face.height() + 2 * by;
    auto background = find_background(image, boxes, pw, ph, derive_seed(boxes_seed, k, 2));
    if (!background) background = osc::resize_bicubic(masked, pw, ph);
    record("classifier", "nonface", "padded", nonface_dir / (stem + "padded.png"),
           osc::pad_face(face, *background, cfg.prepare.pad_fraction, derive_seed(boxes_seed, k, 3)),
           k);
  }
  return result;
}

}  // namespace

int cmd_prepare_data(const RunConfig& cfg) {
  const auto annotations = load_annotations(cfg.dataset.annotations, cfg.dataset.annotation_format);
  std::vector<PreparedImage> prepared(annotations.size());
  osc::parallel_for(annotations.size(), cfg.jobs,
                    [&](std::size_t i) { prepared[i] = prepare_image(cfg, annotations[i], i); });

  std::string manifest;
  json failed = json::array();
  json infeasible = json::array();
  std::size_t records = 0;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const auto& p = prepared[i];
    if (p.error) {
      spdlog::error("{}: {}", annotations[i].image_id, *p.error);
      failed.push_back({{"image_id", annotations[i].image_id}, {"error", *p.error}});
    }
    for (const auto& r : p.records) manifest += r.dump() + "\n";
    for (const auto& r : p.infeasible) infeasible.push_back(r);
    records += p.records.size();
  }
  write_text(fs::path(cfg.out) / "manifest.jsonl", manifest);
  const json summary{{"images", annotations.size()},
                     {"records", records},
                     {"failed", failed},
                     {"infeasible_negatives", infeasible}};
  write_text(fs::path(cfg.out) / "summary.json", summary.dump(2) + "\n");
  spdlog::info("prepare-data: {} images, {} records, {} failed, {} infeasible negatives",
               annotations.size(), records, failed.size(), infeasible.size());
  return failed.empty() ? kSuccess : kPartialFailure;
}

// --------------------------------------------------------------- rank-channels

int cmd_rank_channels(const RunConfig& cfg) {
  const auto annotations = load_annotations(cfg.dataset.annotations, cfg.dataset.annotation_format);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < annotations.size(); ++i)
    if (!annotations[i].regions.empty()) candidates.push_back(i);
  if (candidates.empty()) throw ConfigError("rank-channels: dataset has no annotated image");

  // Seeded partial Fisher-Yates, then back to file order.
  const auto sample = static_cast<std::size_t>(cfg.dataset.sample_size);
  if (candidates.size() > sample) {
    std::mt19937_64 gen(derive_seed(cfg.seed, 0, 0x72616e6b));
    for (std::size_t i = 0; i < sample; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(gen() % (candidates.size() - i));
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(sample);
    std::sort(candidates.begin(), candidates.end());
  }

  const auto backend = make_backend(cfg.backend);
  const int side = backend->descriptor().input_side;
  std::vector<std::optional<osc::AnnotatedImage>> loaded(candidates.size());
  std::vector<std::string> errors(candidates.size());
  osc::parallel_for(candidates.size(), cfg.jobs, [&](std::size_t k) {
    const auto& ann = annotations[candidates[k]];
    try {
      const osc::Image image = load_annotated_image(cfg.dataset.images_root, ann.image_id);
      const double sx = static_cast<double>(side) / image.width();
      const double sy = static_cast<double>(side) / image.height();
      osc::AnnotatedImage item{osc::resize_bicubic(image, side, side), {}};
      for (const auto& b : visible_boxes(ann, image))
        item.boxes.push_back({b.x * sx, b.y * sy, b.w * sx, b.h * sy});
      loaded[k] = std::move(item);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });

  std::vector<osc::AnnotatedImage> dataset;
  json failed = json::array();
  for (std::size_t k = 0; k < loaded.size(); ++k) {
    if (loaded[k]) {
      dataset.push_back(std::move(*loaded[k]));
    } else {
      const auto& id = annotations[candidates[k]].image_id;
      spdlog::error("{}: {}", id, errors[k]);
      failed.push_back({{"image_id", id}, {"error", errors[k]}});
    }
  }
  if (dataset.empty()) {
    spdlog::error("rank-channels: no image could be loaded");
    return kPartialFailure;
  }

  const auto scores = osc::rank_channels(dataset, *backend, cfg.jobs);
  std::ostringstream csv;
  csv << "rank,channel,inside,outside\n";
  for (std::size_t r = 0; r < scores.size(); ++r)
    csv << r + 1 << ',' << scores[r].channel << ',' << osc::format_number(scores[r].inside) << ','
        << osc::format_number(scores[r].outside) << '\n';
  write_text(fs::path(cfg.out) / "channels.csv", csv.str());

  json top = json::array();
  for (std::size_t r = 0; r < std::min<std::size_t>(10, scores.size()); ++r)
    top.push_back({{"channel", scores[r].channel}, {"inside", scores[r].inside}, {"outside", scores[r].outside}});
  const json report{{"osc_channel", scores.front().channel},
                    {"feature_layer", backend->descriptor().feature_layer},
                    {"channels", scores.size()},
                    {"images_used", dataset.size()},
                    {"failed", failed},
                    {"top", top}};
  write_text(fs::path(cfg.out) / "ranking.json", report.dump(2) + "\n");
  spdlog::info("rank-channels: {} images, top channel {} (inside {:.4f}, outside {:.4f})",
               dataset.size(), scores.front().channel, scores.front().inside, scores.front().outside);
  return failed.empty() ? kSuccess : kPartialFailure;
}

// ---------------------------------------------------------------------- detect

namespace {

std::vector<std::string> collect_images(const RunConfig& cfg) {
  const std::string& root = cfg.dataset.images_root;
  std::vector<std::string> entries = cfg.detect_io.images;
  if (entries.empty() && !root.empty()) entries.push_back(".");
  std::vector<std::string> out;
  for (const auto& e : entries) {
    fs::path p(e);
    if (p.is_relative() && !root.empty()) p = fs::path(root) / p;
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& f : fs::recursive_directory_iterator(p))
        if (f.is_regular_file() && is_image_file(f.path())) found.push_back(f.path().lexically_normal().string());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p.lexically_normal().string());
    }
  }
  return out;
}

}  // namespace

int cmd_detect(const RunConfig& cfg) {
  const auto images = collect_images(cfg);
  if (images.empty()) throw ConfigError("detect: no input images (pass paths or --images-root)");
  const auto backend = make_backend(cfg.backend);
  const int side = backend->descriptor().input_side;
  const int channels = backend->infer_features(osc::Image(side, side)).channels;
  if (cfg.detect.osc_channel >= channels)
    throw ConfigError("osc_channel " + std::to_string(cfg.detect.osc_channel) +
                      " is outside the feature layer's " + std::to_string(channels) + " channels");

  std::vector<std::optional<osc::ImageDetections>> results(images.size());
  std::vector<std::string> errors(images.size());
  const fs::path out(cfg.out);
  const int jobs = backend->descriptor().concurrency_safe ? cfg.jobs : 1;
  osc::parallel_for(images.size(), jobs, [&](std::size_t i) {
    const std::string id = image_id_for(images[i], cfg.dataset.images_root);
    try {
      const osc::Image image = osc::read_image(images[i]);
      const auto trace = osc::run_detection(*backend, image, cfg.detect);
      if (cfg.detect_io.emit_heatmaps) {
        const fs::path path = out / "heatmaps" / (id + ".png");
        fs::create_directories(path.parent_path());
        std::optional<int> levels;
        if (cfg.detect_io.heatmap_levels) levels = cfg.detect_io.heatmap_levels;
        osc::write_heatmap_png(path, trace.byte_heatmap, levels);
      }
      results[i] = osc::ImageDetections{id, trace.detections};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<osc::ImageDetections> ok;
  json failed = json::array();
  std::size_t total = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (results[i]) {
      total += results[i]->detections.size();
      ok.push_back(std::move(*results[i]));
    } else {
      spdlog::error("{}: {}", images[i], errors[i]);
      failed.push_back({{"path", images[i]}, {"error", errors[i]}});
    }
  }
  std::ostringstream fddb, jsonl;
  osc::write_fddb_detections(fddb, ok);
  osc::write_detections_jsonl(jsonl, ok);
  write_text(out / "detections.txt", fddb.str());
  write_text(out / "detections.jsonl", jsonl.str());
  const json summary{{"images", images.size()}, {"processed", ok.size()}, {"detections", total}, {"failed", failed}};
  write_text(out / "summary.json", summary.dump(2) + "\n");
  spdlog::info("detect: {} images, {} detections, {} failed", images.size(), total, failed.size());
  return failed.empty() ? kSuccess : kPartialFailure;
}

// -------------------------------------------------------------------- evaluate

namespace {

std::vector<osc::Annotation> load_eval_annotations(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("annotation file not found: " + path);
  const auto ext = fs::path(path).extension();
  return ext == ".jsonl" || ext == ".json" ? osc::read_annotations_jsonl(path)
                                           : osc::read_fddb_ellipses(path);
}

osc::PlotSeries curve_series(const std::string& label, const osc::EvalCurve& curve) {
  osc::PlotSeries s{label, {}, {}};
  for (const auto& p : curve.points) {
    s.x.push_back(static_cast<double>(p.fp_count));
    s.y.push_back(p.tpr);
  }
  return s;
}

json curve_summary(const osc::EvalCurve& curve) {
  if (curve.points.empty()) return {{"points", 0}, {"final_tpr", 0.0}, {"final_fp", 0}};
  const auto& last = curve.points.back();
  return {{"points", curve.points.size()}, {"final_tpr", last.tpr}, {"final_fp", last.fp_count}};
}

std::string csv_of(const osc::EvalCurve& curve) {
  std::ostringstream s;
  osc::write_curve_csv(s, curve);
  return s.str();
}

}  // namespace

int cmd_evaluate(const RunConfig& cfg) {
  const auto& ev = cfg.evaluate;
  if (ev.detections.empty()) throw ConfigError("evaluate: --detections is required");
  if (!fs::exists(ev.detections)) throw ConfigError("detections file not found: " + ev.detections);
  if (ev.annotations.empty()) throw ConfigError("evaluate: at least one --annotations file is required");

  const auto detections = osc::read_detections(ev.detections);
  std::map<std::string, const osc::ImageDetections*> by_id;
  for (const auto& d : detections) by_id[d.image_id] = &d;

  const bool fddb = ev.protocol == "fddb";
  std::vector<std::vector<osc::ImageEval>> folds;
  std::set<std::string> annotated;
  json missing = json::array();
  for (const auto& file : ev.annotations) {
    std::vector<osc::ImageEval> fold;
    for (auto& ann : load_eval_annotations(file)) {
      osc::ImageEval e{ann.image_id, {}, std::move(ann.regions), std::nullopt};
      annotated.insert(e.image_id);
      const auto it = by_id.find(e.image_id);
      if (it == by_id.end()) {
        missing.push_back(e.image_id);
      } else {
        for (const auto& d : it->second->detections) {
          const osc::Region r = fddb ? osc::Region(osc::detection_to_ellipse(d)) : osc::Region(d.box);
          e.detections.push_back({r, d.score});
        }
      }
      fold.push_back(std::move(e));
    }
    folds.push_back(std::move(fold));
  }
  json unknown = json::array();
  for (const auto& d : detections)
    if (!annotated.count(d.image_id)) unknown.push_back(d.image_id);
  if (!missing.empty())
    spdlog::warn("evaluate: {} annotated images have no detection record", missing.size());
  if (!unknown.empty())
    spdlog::error("evaluate: {} detection records have no annotation", unknown.size());

  const fs::path out(cfg.out);
  json summary{{"protocol", ev.protocol},
               {"images", annotated.size()},
               {"missing_detections", missing},
               {"unknown_detections", unknown}};
  std::size_t total_gt = 0;
  for (const auto& f : folds)
    for (const auto& e : f) total_gt += e.ground_truth.size();
  summary["ground_truth"] = total_gt;

  if (fddb) {
    std::vector<osc::PlotSeries> series;
    json per_fold = json::array();
    for (auto protocol : {osc::Protocol::discrete, osc::Protocol::continuous}) {
      const auto curves = osc::fold_roc_curves(folds, protocol);
      const std::string name = osc::to_string(protocol);
      write_text(out / ("roc_" + name + ".csv"), csv_of(curves.combined));
      for (std::size_t k = 0; k < curves.per_fold.size(); ++k) {
        char fold_name[32];
        std::snprintf(fold_name, sizeof fold_name, "fold_%02zu_", k + 1);
        write_text(out / "folds" / (fold_name + name + ".csv"), csv_of(curves.per_fold[k]));
      }
      summary[name] = curve_summary(curves.combined);
      json folds_json = json::array();
      for (const auto& c : curves.per_fold) folds_json.push_back(curve_summary(c));
      summary[name + "_folds"] = folds_json;
      series.push_back(curve_series(name, curves.combined));
    }
    osc::write_plot_png(out / "roc.png", series, "false positives", "true positive rate");
  } else {
    std::vector<osc::ImageEval> all;
    for (auto& f : folds)
      for (auto& e : f) all.push_back(std::move(e));
    if (total_gt == 0) throw ConfigError("evaluate: annotations contain no ground truth");
    const double ap = osc::pascal_ap(all);
    const auto pr = osc::precision_recall(all);
    std::ostringstream csv;
    osc::write_pr_csv(csv, pr);
    write_text(out / "pr.csv", csv.str());
    osc::PlotSeries s{"AP " + osc::format_number(std::round(ap * 1e4) / 1e4), {}, {}};
    for (const auto& p : pr) {
      s.x.push_back(p.recall);
      s.y.push_back(p.precision);
    }
    osc::write_plot_png(out / "pr.png", {s}, "recall", "precision");
    summary["ap"] = ap;
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  spdlog::info("evaluate: {} protocol over {} images", ev.protocol, annotated.size());
  return unknown.empty() ? kSuccess : kPartialFailure;
}

// ------------------------------------------------------------------------ main

namespace {

// Command-line values that override the config file when given.
class Overrides {
 public:
  template <typename T>
  CLI::Option* option(CLI::App* sub, const std::string& name, const std::string& help,
                      std::function<void(RunConfig&, const T&)> apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = sub->add_option(name, *value, help);
    actions_.push_back([opt, value, apply](RunConfig& c) {
      if (opt->count()) apply(c, *value);
    });
    return opt;
  }

  void flag(CLI::App* sub, const std::string& name, const std::string& help,
            std::function<void(RunConfig&)> apply) {
    CLI::Option* opt = sub->add_flag(name, help);
    actions_.push_back([opt, apply](RunConfig& c) {
      if (opt->count()) apply(c);
    });
  }

  void apply(RunConfig& cfg) const {
    for (const auto& a : actions_) a(cfg);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> actions_;
};

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Face detection from an object specific CNN channel"};
  app.require_subcommand(1);
  Overrides bind;

  std::string config_path;
  std::string log_level = "info";
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--log-level", log_level, "trace, debug, info, warn, error or off");
    bind.option<int>(sub, "--jobs", "worker threads", [](RunConfig& c, const int& v) { c.jobs = v; });
    bind.option<std::uint64_t>(sub, "--seed", "run seed",
                                     [](RunConfig& c, const std::uint64_t& v) { c.seed = v; });
    bind.option<std::string>(sub, "--out", "output directory",
                                   [](RunConfig& c, const std::string& v) { c.out = v; });
  };
  auto dataset = [&](CLI::App* sub) {
    bind.option<std::string>(sub, "--annotations", "annotation file",
                                   [](RunConfig& c, const std::string& v) { c.dataset.annotations = v; });
    bind.option<std::string>(sub, "--annotation-format", "jsonl or fddb",
                                   [](RunConfig& c, const std::string& v) { c.dataset.annotation_format = v; });
    bind.option<std::string>(sub, "--images-root", "directory image ids are relative to",
                                   [](RunConfig& c, const std::string& v) { c.dataset.images_root = v; });
  };
  auto backend = [&](CLI::App* sub) {
    bind.option<std::string>(sub, "--backend", "synthetic or onnx",
                                   [](RunConfig& c, const std::string& v) { c.backend.type = v; });
    bind.option<std::string>(sub, "--model", "ONNX model path (selects the onnx backend)",
                                   [](RunConfig& c, const std::string& v) {
                                     c.backend.type = "onnx";
                                     c.backend.onnx.model_path = v;
                                   });
    bind.option<std::uint64_t>(sub, "--synthetic-seed", "synthetic backend seed",
                                     [](RunConfig& c, const std::uint64_t& v) { c.backend.synthetic.seed = v; });
    bind.option<int>(sub, "--planted-channel", "synthetic backend planted channel",
                           [](RunConfig& c, const int& v) { c.backend.synthetic.planted_channel = v; });
    bind.option<int>(sub, "--channels", "synthetic backend channel count",
                           [](RunConfig& c, const int& v) { c.backend.synthetic.channels = v; });
  };

  CLI::App* prepare = app.add_subcommand("prepare-data", "build training crops and a manifest");
  common(prepare);
  dataset(prepare);

  CLI::App* rank = app.add_subcommand("rank-channels", "rank feature channels by face response");
  common(rank);
  dataset(rank);
  backend(rank);
  bind.option<int>(rank, "--sample-size", "images to sample",
                         [](RunConfig& c, const int& v) { c.dataset.sample_size = v; });

  CLI::App* detect = app.add_subcommand("detect", "detect faces in images");
  common(detect);
  backend(detect);
  bind.option<std::vector<std::string>>(
      detect, "images", "image files or directories",
      [](RunConfig& c, const std::vector<std::string>& v) { c.detect_io.images = v; });
  bind.option<std::string>(detect, "--images-root", "directory image ids are relative to",
                                 [](RunConfig& c, const std::string& v) { c.dataset.images_root = v; });
  bind.option<int>(detect, "--osc-channel", "object specific channel index",
                         [](RunConfig& c, const int& v) { c.detect.osc_channel = v; });
  bind.option<double>(detect, "--threshold", "proposal face-score threshold",
                            [](RunConfig& c, const double& v) { c.detect.proposal.threshold = v; });
  bind.option<double>(detect, "--accept-score", "classifier acceptance score",
                            [](RunConfig& c, const double& v) { c.detect.accept_score = v; });
  bind.option<double>(detect, "--nms-iou", "NMS overlap threshold",
                            [](RunConfig& c, const double& v) { c.detect.nms_iou = v; });
  bind.option<int>(detect, "--heatmap-levels", "quantize emitted heatmaps to this many levels",
                         [](RunConfig& c, const int& v) { c.detect_io.heatmap_levels = v; });
  bind.flag(detect, "--emit-heatmaps", "write the merged heatmap of every image",
       [](RunConfig& c) { c.detect_io.emit_heatmaps = true; });

  CLI::App* evaluate = app.add_subcommand("evaluate", "score detections against annotations");
  common(evaluate);
  bind.option<std::string>(evaluate, "--protocol", "fddb or pascal",
                                 [](RunConfig& c, const std::string& v) { c.evaluate.protocol = v; });
  bind.option<std::string>(evaluate, "--detections", "detections file (.txt or .jsonl)",
                                 [](RunConfig& c, const std::string& v) { c.evaluate.detections = v; });
  bind.option<std::vector<std::string>>(
      evaluate, "--annotations", "annotation files; one fold each for fddb",
      [](RunConfig& c, const std::vector<std::string>& v) { c.evaluate.annotations = v; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInvalidConfig;
  }

  const auto level = spdlog::level::from_str(log_level);
  spdlog::set_level(level);

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    bind.apply(cfg);
    validate(cfg);
    fs::create_directories(cfg.out);
    write_text(fs::path(cfg.out) / "config.json", config_to_json(cfg).dump(2) + "\n");
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kInvalidConfig;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kInvalidConfig;
  }

  try {
    if (*prepare) return cmd_prepare_data(cfg);
    if (*rank) return cmd_rank_channels(cfg);
    if (*detect) return cmd_detect(cfg);
    return cmd_evaluate(cfg);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kInvalidConfig;
  } catch (const osc::FormatError& e) {
    spdlog::error("{}", e.what());
    return kInvalidConfig;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kInvalidConfig;
  } catch (const osc::BackendError& e) {
    spdlog::error("backend: {}", e.what());
    return kInvalidConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kPartialFailure;
  }
}

}  // namespace oscdet
