#pragma once

#include <cstdint>
#include <vector>

#include "osc/backend.hpp"

namespace osc {

struct SyntheticConfig {
  static constexpr std::uint64_t kDefaultSeed = 20160707;

  std::uint64_t seed = kDefaultSeed;
  int planted_channel = 196;
  int channels = 256;
  int grid = 13;
  int input_side = 227;
};

/// Stand-in for a fine-tuned network with a known object specific channel.
///
/// Feature layer: the input is converted to luma and, at the centre of each
/// of the grid x grid cells, a window of side ~3 cell strides is
/// correlated (zero-mean normalized cross-correlation) with a soft disc
/// template. Negative correlations are clamped to zero; the result is the
/// planted channel. Every other channel holds uniform noise in
/// [0, 0.1 * max(planted)] drawn from mt19937_64 seeded with
/// `seed ^ fnv1a(image bytes)`, so identical images give identical maps.
///
/// Class head: the face probability is logistic(10 * (ncc - 0.5)) where ncc
/// correlates the whole input with a centred soft disc of radius
/// 0.45 * input_side. The dark surround makes crops that cut through a
/// larger disc score low.
/// Flat windows (zero variance) correlate to 0.
///
/// Holds no mutable state; safe to share between threads.
class SyntheticBackend final : public InferenceBackend {
 public:
  explicit SyntheticBackend(SyntheticConfig config = {});

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  const SyntheticConfig& config() const { return config_; }

  FeatureMaps infer_features(const Image& image) const override;
  std::vector<double> infer_class_scores(std::span<const Image> batch) const override;

  /// Planted-channel response, grid x grid, row-major.
  std::vector<float> planted_response(std::span<const float> gray) const;
  /// Normalized correlation of a luma plane with the centred frame disc.
  double frame_correlation(std::span<const float> gray) const;

  int template_side() const { return template_side_; }
  double template_radius() const { return template_radius_; }

 private:
  SyntheticConfig config_;
  BackendDescriptor descriptor_;
  int template_side_ = 0;
  double template_radius_ = 0.0;
  std::vector<float> cell_template_;   // zero-mean
  double cell_template_norm_ = 0.0;
  std::vector<float> frame_template_;  // zero-mean
  double frame_template_norm_ = 0.0;
};

/// Soft disc intensity in [0,1] at distance `d` from the centre.
double soft_disc(double d, double radius, double softness);

/// logistic(10 * (correlation - 0.5)), the synthetic classifier's squashing.
double synthetic_class_score(double correlation);

}  // namespace osc
