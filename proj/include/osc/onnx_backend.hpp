#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <string>

#include "osc/backend.hpp"

namespace osc {

/// Tensor names and preprocessing for a network stored as an ONNX graph.
struct OnnxModelConfig {
  std::string model_path;
  std::string input_tensor = "data";
  std::string feature_tensor = "features";
  std::string class_tensor = "prob";
  int input_side = 227;
  int face_class_index = 1;
  /// "rgb" or "bgr": channel order of the network input planes.
  std::string channel_order = "rgb";
  /// Per input plane, in network channel order; value = (pixel - mean) * scale.
  std::array<float, 3> mean{0.0f, 0.0f, 0.0f};
  float scale = 1.0f / 255.0f;
  /// Clamp feature activations at zero (post-rectification reading).
  bool rectify = true;
  /// Apply softmax to the class tensor (set when it carries logits).
  bool softmax = false;
};

/// Runs an ONNX model through OpenCV's DNN module. The graph is validated on
/// load with a probe forward pass: the feature tensor must be 1xCxHxW and the
/// class tensor must hold two values. Not concurrency safe; calls are
/// serialized internally.
class OnnxBackend final : public InferenceBackend {
 public:
  explicit OnnxBackend(OnnxModelConfig config);
  ~OnnxBackend() override;

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  const OnnxModelConfig& config() const { return config_; }

  FeatureMaps infer_features(const Image& image) const override;
  std::vector<double> infer_class_scores(std::span<const Image> batch) const override;

 private:
  struct Impl;
  OnnxModelConfig config_;
  BackendDescriptor descriptor_;
  std::unique_ptr<Impl> impl_;
  mutable std::mutex mutex_;
};

}  // namespace osc
