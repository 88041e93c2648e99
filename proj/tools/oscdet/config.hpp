#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "osc/backend.hpp"
#include "osc/dataprep.hpp"
#include "osc/detector.hpp"
#include "osc/onnx_backend.hpp"
#include "osc/synthetic_backend.hpp"

namespace oscdet {

/// Invalid or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BackendSpec {
  std::string type = "synthetic";  // "synthetic" or "onnx"
  osc::SyntheticConfig synthetic;
  osc::OnnxModelConfig onnx;
};

struct DatasetSpec {
  std::string annotations;  // JSONL, or FDDB ellipse text when the format says so
  std::string annotation_format = "jsonl";  // "jsonl" or "fddb"
  std::string images_root;
  int sample_size = 1000;
};

struct PrepareSpec {
  double darken_gain = 0.4;
  int blur_radius = 3;
  double occlusion_fraction = 0.25;
  double pad_fraction = 0.5;
  std::vector<double> iou_targets{0.0, 0.1, 0.2};
};

struct DetectSpec {
  std::vector<std::string> images;  // paths; relative ones resolve against images_root
  bool emit_heatmaps = false;
  int heatmap_levels = 0;  // 0 writes the unquantized byte map
};

struct EvaluateSpec {
  std::string protocol = "fddb";  // "fddb" or "pascal"
  std::string detections;
  std::vector<std::string> annotations;  // one file per fold for fddb
};

/// Everything a run depends on. Written back as config.json so a run can be
/// repeated with `--config <out>/config.json`.
struct RunConfig {
  RunConfig() { detect.osc_channel = backend.synthetic.planted_channel; }

  BackendSpec backend;
  osc::DetectConfig detect;
  DatasetSpec dataset;
  PrepareSpec prepare;
  DetectSpec detect_io;
  EvaluateSpec evaluate;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

/// Unknown keys and wrongly typed values are errors.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

/// Range checks shared by every command.
void validate(const RunConfig& cfg);

std::unique_ptr<osc::InferenceBackend> make_backend(const BackendSpec& spec);

}  // namespace oscdet
