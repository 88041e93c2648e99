#include "osc/onnx_backend.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

namespace osc {

struct OnnxBackend::Impl {
  cv::dnn::Net net;

  cv::Mat forward(const cv::Mat& blob, const std::string& input, const std::string& output) {
    net.setInput(blob, input);
    return net.forward(output).clone();
  }
};

namespace {

cv::Mat to_blob(const Image& image, const OnnxModelConfig& cfg) {
  const int s = cfg.input_side;
  cv::Mat blob(std::vector<int>{1, 3, s, s}, CV_32F);
  const bool bgr = cfg.channel_order == "bgr";
  auto* dst = blob.ptr<float>();
  for (int c = 0; c < 3; ++c) {
    const int src_c = bgr ? 2 - c : c;
    float* plane = dst + static_cast<std::size_t>(c) * s * s;
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x)
        plane[static_cast<std::size_t>(y) * s + x] =
            (static_cast<float>(image.at(x, y, src_c)) - cfg.mean[c]) * cfg.scale;
  }
  return blob;
}

}  // namespace

OnnxBackend::OnnxBackend(OnnxModelConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  if (config_.channel_order != "rgb" && config_.channel_order != "bgr")
    throw std::invalid_argument("channel_order must be \"rgb\" or \"bgr\"");
  if (config_.face_class_index < 0 || config_.face_class_index > 1)
    throw std::invalid_argument("face_class_index must be 0 or 1");
  if (!std::filesystem::exists(config_.model_path))
    throw BackendError("model file not found: " + config_.model_path);
  try {
    impl_->net = cv::dnn::readNetFromONNX(config_.model_path);
  } catch (const cv::Exception& e) {
    throw BackendError("cannot load model " + config_.model_path + ": " + e.what());
  }
  for (const auto& name : {config_.feature_tensor, config_.class_tensor}) {
    if (impl_->net.getLayerId(name) < 0)
      throw BackendError("model has no layer named '" + name + "'");
  }
  descriptor_.input_side = config_.input_side;
  descriptor_.feature_layer = config_.feature_tensor;
  descriptor_.class_count = 2;
  descriptor_.concurrency_safe = false;

  const Image probe(config_.input_side, config_.input_side, 0);
  const FeatureMaps maps = infer_features(probe);
  if (maps.channels <= 0) throw BackendError("feature tensor is empty");
  infer_class_scores(std::span<const Image>(&probe, 1));
}

OnnxBackend::~OnnxBackend() = default;

FeatureMaps OnnxBackend::infer_features(const Image& image) const {
  require_input_size(image, config_.input_side);
  cv::Mat out;
  {
    std::lock_guard lock(mutex_);
    try {
      out = impl_->forward(to_blob(image, config_), config_.input_tensor, config_.feature_tensor);
    } catch (const cv::Exception& e) {
      throw BackendError(std::string("feature inference failed: ") + e.what());
    }
  }
  if (out.dims != 4 || out.size[0] != 1)
    throw BackendError("feature tensor '" + config_.feature_tensor + "' is not 1xCxHxW");
  FeatureMaps maps;
  maps.channels = out.size[1];
  maps.height = out.size[2];
  maps.width = out.size[3];
  const auto* src = out.ptr<float>();
  maps.values.assign(src, src + out.total());
  if (config_.rectify)
    for (float& v : maps.values) v = std::max(v, 0.0f);
  return maps;
}

std::vector<double> OnnxBackend::infer_class_scores(std::span<const Image> batch) const {
  std::vector<double> scores;
  scores.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int index = static_cast<int>(i);
    require_input_size(batch[i], config_.input_side, index);
    cv::Mat out;
    {
      std::lock_guard lock(mutex_);
      try {
        out = impl_->forward(to_blob(batch[i], config_), config_.input_tensor,
                             config_.class_tensor);
      } catch (const cv::Exception& e) {
        throw BackendError("batch member " + std::to_string(i) + ": " + e.what(), index);
      }
    }
    if (out.total() != 2)
      throw BackendError("class tensor '" + config_.class_tensor + "' must hold 2 values",
                         index);
    const auto* p = out.ptr<float>();
    double face = p[config_.face_class_index];
    if (config_.softmax) {
      const double other = p[1 - config_.face_class_index];
      face = 1.0 / (1.0 + std::exp(other - face));
    }
    scores.push_back(std::clamp(face, 0.0, 1.0));
  }
  return scores;
}

}  // namespace osc
