#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "osc/image.hpp"

namespace osc {

/// C x H x W activations of one hidden layer, channel-major.
struct FeatureMaps {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> values;

  std::span<const float> channel(int c) const {
    return std::span<const float>(values).subspan(
        static_cast<std::size_t>(c) * height * width,
        static_cast<std::size_t>(height) * width);
  }
  float at(int c, int y, int x) const {
    return values[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

struct BackendDescriptor {
  int input_side = 227;
  std::string feature_layer;
  int class_count = 2;
  bool concurrency_safe = false;
};

/// Raised for inference failures. `index` names the offending batch member
/// when the failure is tied to one input, otherwise -1.
class BackendError : public std::runtime_error {
 public:
  explicit BackendError(const std::string& what, int index = -1)
      : std::runtime_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

/// A convolutional network seen through two probes: the activations of a
/// configured feature layer and the face probability of the 2-class head.
/// Both calls are deterministic. Implementations that report
/// `concurrency_safe == false` must not be called from several threads at
/// once.
class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  /// `image` must be input_side x input_side.
  virtual FeatureMaps infer_features(const Image& image) const = 0;

  /// Face probability per image, in input order. An empty batch yields an
  /// empty result. Wrong-sized members raise BackendError with their index.
  virtual std::vector<double> infer_class_scores(std::span<const Image> batch) const = 0;
};

/// Throws BackendError unless the image is side x side.
void require_input_size(const Image& image, int side, int index = -1);

}  // namespace osc
