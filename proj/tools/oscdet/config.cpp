#include "config.hpp"

#include <fstream>
#include <set>

namespace oscdet {

using nlohmann::json;

namespace {

// Reads fields of one JSON object, remembering which keys were consumed so
// leftovers can be reported as unknown.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& dst) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      dst = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(label(key) + " has the wrong type");
    }
  }

  const json* object(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string label(const char* key = nullptr) const {
    std::string s = path_.empty() ? "config" : path_;
    if (key) s += std::string(path_.empty() ? "" : ".") + key;
    return s;
  }

  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key " + child(it.key().c_str()));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_synthetic(const json& j, const std::string& path, osc::SyntheticConfig& s) {
  Fields f(j, path);
  f.read("seed", s.seed);
  f.read("planted_channel", s.planted_channel);
  f.read("channels", s.channels);
  f.read("grid", s.grid);
  f.read("input_side", s.input_side);
  f.finish();
}

void read_onnx(const json& j, const std::string& path, osc::OnnxModelConfig& o) {
  Fields f(j, path);
  f.read("model", o.model_path);
  f.read("input_tensor", o.input_tensor);
  f.read("feature_tensor", o.feature_tensor);
  f.read("class_tensor", o.class_tensor);
  f.read("input_side", o.input_side);
  f.read("face_class_index", o.face_class_index);
  f.read("channel_order", o.channel_order);
  f.read("mean", o.mean);
  f.read("scale", o.scale);
  f.read("rectify", o.rectify);
  f.read("softmax", o.softmax);
  f.finish();
}

std::string checked_path(const std::string& p, const std::string& what) {
  if (p.empty()) throw ConfigError(what + " is required");
  return p;
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  Fields top(j, "");
  if (const json* b = top.object("backend")) {
    Fields f(*b, "backend");
    f.read("type", cfg.backend.type);
    if (const json* s = f.object("synthetic")) read_synthetic(*s, "backend.synthetic", cfg.backend.synthetic);
    if (const json* o = f.object("onnx")) read_onnx(*o, "backend.onnx", cfg.backend.onnx);
    f.finish();
  }
  top.read("osc_channel", cfg.detect.osc_channel);
  if (const json* t = top.object("tiling")) {
    Fields f(*t, "tiling");
    f.read("windows", cfg.detect.tiling.windows);
    f.read("stride_ratio", cfg.detect.tiling.stride_ratio);
    f.finish();
  }
  if (const json* p = top.object("proposal")) {
    Fields f(*p, "proposal");
    f.read("threshold", cfg.detect.proposal.threshold);
    f.read("windows", cfg.detect.proposal.window_sides);
    f.read("stride_ratio", cfg.detect.proposal.stride_ratio);
    f.read("max_proposals", cfg.detect.proposal.max_proposals);
    f.finish();
  }
  top.read("nms_iou", cfg.detect.nms_iou);
  top.read("accept_score", cfg.detect.accept_score);
  if (const json* d = top.object("dataset")) {
    Fields f(*d, "dataset");
    f.read("annotations", cfg.dataset.annotations);
    f.read("annotation_format", cfg.dataset.annotation_format);
    f.read("images_root", cfg.dataset.images_root);
    f.read("sample_size", cfg.dataset.sample_size);
    f.finish();
  }
  if (const json* p = top.object("prepare")) {
    Fields f(*p, "prepare");
    f.read("darken_gain", cfg.prepare.darken_gain);
    f.read("blur_radius", cfg.prepare.blur_radius);
    f.read("occlusion_fraction", cfg.prepare.occlusion_fraction);
    f.read("pad_fraction", cfg.prepare.pad_fraction);
    f.read("iou_targets", cfg.prepare.iou_targets);
    f.finish();
  }
  if (const json* d = top.object("detect")) {
    Fields f(*d, "detect");
    f.read("images", cfg.detect_io.images);
    f.read("emit_heatmaps", cfg.detect_io.emit_heatmaps);
    f.read("heatmap_levels", cfg.detect_io.heatmap_levels);
    f.finish();
  }
  if (const json* e = top.object("evaluate")) {
    Fields f(*e, "evaluate");
    f.read("protocol", cfg.evaluate.protocol);
    f.read("detections", cfg.evaluate.detections);
    f.read("annotations", cfg.evaluate.annotations);
    f.finish();
  }
  top.read("seed", cfg.seed);
  top.read("jobs", cfg.jobs);
  top.read("out", cfg.out);
  top.finish();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  const auto& s = cfg.backend.synthetic;
  const auto& o = cfg.backend.onnx;
  const auto& d = cfg.detect;
  return {
      {"backend",
       {{"type", cfg.backend.type},
        {"synthetic",
         {{"seed", s.seed},
          {"planted_channel", s.planted_channel},
          {"channels", s.channels},
          {"grid", s.grid},
          {"input_side", s.input_side}}},
        {"onnx",
         {{"model", o.model_path},
          {"input_tensor", o.input_tensor},
          {"feature_tensor", o.feature_tensor},
          {"class_tensor", o.class_tensor},
          {"input_side", o.input_side},
          {"face_class_index", o.face_class_index},
          {"channel_order", o.channel_order},
          {"mean", o.mean},
          {"scale", o.scale},
          {"rectify", o.rectify},
          {"softmax", o.softmax}}}}},
      {"osc_channel", d.osc_channel},
      {"tiling", {{"windows", d.tiling.windows}, {"stride_ratio", d.tiling.stride_ratio}}},
      {"proposal",
       {{"threshold", d.proposal.threshold},
        {"windows", d.proposal.window_sides},
        {"stride_ratio", d.proposal.stride_ratio},
        {"max_proposals", d.proposal.max_proposals}}},
      {"nms_iou", d.nms_iou},
      {"accept_score", d.accept_score},
      {"dataset",
       {{"annotations", cfg.dataset.annotations},
        {"annotation_format", cfg.dataset.annotation_format},
        {"images_root", cfg.dataset.images_root},
        {"sample_size", cfg.dataset.sample_size}}},
      {"prepare",
       {{"darken_gain", cfg.prepare.darken_gain},
        {"blur_radius", cfg.prepare.blur_radius},
        {"occlusion_fraction", cfg.prepare.occlusion_fraction},
        {"pad_fraction", cfg.prepare.pad_fraction},
        {"iou_targets", cfg.prepare.iou_targets}}},
      {"detect",
       {{"images", cfg.detect_io.images},
        {"emit_heatmaps", cfg.detect_io.emit_heatmaps},
        {"heatmap_levels", cfg.detect_io.heatmap_levels}}},
      {"evaluate",
       {{"protocol", cfg.evaluate.protocol},
        {"detections", cfg.evaluate.detections},
        {"annotations", cfg.evaluate.annotations}}},
      {"seed", cfg.seed},
      {"jobs", cfg.jobs},
      {"out", cfg.out},
  };
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void validate(const RunConfig& cfg) {
  if (cfg.backend.type != "synthetic" && cfg.backend.type != "onnx")
    throw ConfigError("backend.type must be 'synthetic' or 'onnx'");
  if (cfg.backend.type == "onnx") checked_path(cfg.backend.onnx.model_path, "backend.onnx.model");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.out.empty()) throw ConfigError("an output directory (--out) is required");
  if (cfg.dataset.annotation_format != "jsonl" && cfg.dataset.annotation_format != "fddb")
    throw ConfigError("dataset.annotation_format must be 'jsonl' or 'fddb'");
  if (cfg.dataset.sample_size < 1) throw ConfigError("dataset.sample_size must be >= 1");
  if (cfg.detect_io.heatmap_levels != 0 && cfg.detect_io.heatmap_levels < 2)
    throw ConfigError("detect.heatmap_levels must be 0 or >= 2");
  if (cfg.evaluate.protocol != "fddb" && cfg.evaluate.protocol != "pascal")
    throw ConfigError("evaluate.protocol must be 'fddb' or 'pascal'");
  const auto& p = cfg.prepare;
  if (!(p.darken_gain > 0.0 && p.darken_gain <= 1.0)) throw ConfigError("prepare.darken_gain must be in (0, 1]");
  if (p.blur_radius < 0) throw ConfigError("prepare.blur_radius must be >= 0");
  if (!(p.occlusion_fraction >= 0.0 && p.occlusion_fraction < 1.0))
    throw ConfigError("prepare.occlusion_fraction must be in [0, 1)");
  if (!(p.pad_fraction >= 0.0)) throw ConfigError("prepare.pad_fraction must be >= 0");
  for (double t : p.iou_targets)
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("prepare.iou_targets must lie in [0, 1)");
  try {
    osc::validate(cfg.detect);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::unique_ptr<osc::InferenceBackend> make_backend(const BackendSpec& spec) {
  if (spec.type == "onnx") return std::make_unique<osc::OnnxBackend>(spec.onnx);
  return std::make_unique<osc::SyntheticBackend>(spec.synthetic);
}

}  // namespace oscdet
