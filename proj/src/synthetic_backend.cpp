#include "osc/synthetic_backend.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace osc {

namespace {

constexpr double kCellDiscFraction = 0.35;
constexpr double kSoftness = 1.0;
constexpr double kNoiseFraction = 0.1;
constexpr double kFrameDiscFraction = 0.45;

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double unit_interval(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Returns the zero-mean template and its L2 norm.
std::pair<std::vector<float>, double> centered(std::vector<double> t) {
  double mean = 0.0;
  for (double v : t) mean += v;
  mean /= static_cast<double>(t.size());
  std::vector<float> out(t.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double c = t[i] - mean;
    out[i] = static_cast<float>(c);
    norm += c * c;
  }
  return {std::move(out), std::sqrt(norm)};
}

std::vector<double> disc_plane(int side, double radius, double softness) {
  std::vector<double> t(static_cast<std::size_t>(side) * side);
  const double c = side / 2.0;
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      t[static_cast<std::size_t>(y) * side + x] =
          soft_disc(std::hypot(x + 0.5 - c, y + 0.5 - c), radius, softness);
  return t;
}

double ncc(double dot, double sum, double sum_sq, std::size_t n, double template_norm) {
  const double mean = sum / static_cast<double>(n);
  const double var = sum_sq - static_cast<double>(n) * mean * mean;
  if (var <= 1e-9 * static_cast<double>(n) || template_norm <= 0.0) return 0.0;
  return dot / (std::sqrt(var) * template_norm);
}

}  // namespace

double soft_disc(double d, double radius, double softness) {
  return 1.0 / (1.0 + std::exp((d - radius) / softness));
}

double synthetic_class_score(double correlation) {
  return 1.0 / (1.0 + std::exp(-(correlation - 0.5) * 10.0));
}

SyntheticBackend::SyntheticBackend(SyntheticConfig config) : config_(config) {
  if (config_.input_side < 8 || config_.grid < 1 || config_.grid > config_.input_side)
    throw std::invalid_argument("synthetic backend: bad input side or grid");
  if (config_.channels < 1) throw std::invalid_argument("synthetic backend: channels < 1");
  if (config_.planted_channel < 0 || config_.planted_channel >= config_.channels)
    throw std::invalid_argument("synthetic backend: planted channel out of range");

  descriptor_.input_side = config_.input_side;
  descriptor_.feature_layer = "synthetic/disc";
  descriptor_.class_count = 2;
  descriptor_.concurrency_safe = true;

  const double stride = static_cast<double>(config_.input_side) / config_.grid;
  template_side_ = 2 * static_cast<int>(std::lround(1.5 * stride)) + 1;
  template_radius_ = kCellDiscFraction * template_side_;
  std::tie(cell_template_, cell_template_norm_) =
      centered(disc_plane(template_side_, template_radius_, kSoftness));

  const int s = config_.input_side;
  std::tie(frame_template_, frame_template_norm_) =
      centered(disc_plane(s, kFrameDiscFraction * s, kSoftness * s / 227.0));
}

std::vector<float> SyntheticBackend::planted_response(std::span<const float> gray) const {
  const int s = config_.input_side;
  const int g = config_.grid;
  const int t = template_side_;
  const double stride = static_cast<double>(s) / g;
  std::vector<float> out(static_cast<std::size_t>(g) * g);
  std::vector<int> cols(t);
  for (int gy = 0; gy < g; ++gy) {
    const int y0 = static_cast<int>(std::lround((gy + 0.5) * stride)) - t / 2;
    for (int gx = 0; gx < g; ++gx) {
      const int x0 = static_cast<int>(std::lround((gx + 0.5) * stride)) - t / 2;
      for (int k = 0; k < t; ++k) cols[k] = std::clamp(x0 + k, 0, s - 1);
      double dot = 0.0, sum = 0.0, sum_sq = 0.0;
      for (int ky = 0; ky < t; ++ky) {
        const float* row = gray.data() + static_cast<std::size_t>(std::clamp(y0 + ky, 0, s - 1)) * s;
        const float* tpl = cell_template_.data() + static_cast<std::size_t>(ky) * t;
        for (int kx = 0; kx < t; ++kx) {
          const double v = row[cols[kx]];
          dot += v * tpl[kx];
          sum += v;
          sum_sq += v * v;
        }
      }
      const double r = ncc(dot, sum, sum_sq, static_cast<std::size_t>(t) * t, cell_template_norm_);
      out[static_cast<std::size_t>(gy) * g + gx] = static_cast<float>(std::max(0.0, r));
    }
  }
  return out;
}

double SyntheticBackend::frame_correlation(std::span<const float> gray) const {
  double dot = 0.0, sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const double v = gray[i];
    dot += v * frame_template_[i];
    sum += v;
    sum_sq += v * v;
  }
  return ncc(dot, sum, sum_sq, gray.size(), frame_template_norm_);
}

FeatureMaps SyntheticBackend::infer_features(const Image& image) const {
  require_input_size(image, config_.input_side);
  const auto planted = planted_response(to_gray(image));
  const float peak = *std::max_element(planted.begin(), planted.end());

  FeatureMaps maps;
  maps.channels = config_.channels;
  maps.height = config_.grid;
  maps.width = config_.grid;
  const std::size_t cell_count = planted.size();
  maps.values.assign(cell_count * config_.channels, 0.0f);

  std::mt19937_64 gen(config_.seed ^ fnv1a(image.bytes()));
  const double amplitude = kNoiseFraction * peak;
  for (int c = 0; c < config_.channels; ++c) {
    float* dst = maps.values.data() + static_cast<std::size_t>(c) * cell_count;
    if (c == config_.planted_channel) {
      std::copy(planted.begin(), planted.end(), dst);
      continue;
    }
    for (std::size_t i = 0; i < cell_count; ++i)
      dst[i] = static_cast<float>(unit_interval(gen) * amplitude);
  }
  return maps;
}

std::vector<double> SyntheticBackend::infer_class_scores(std::span<const Image> batch) const {
  std::vector<double> scores;
  scores.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    require_input_size(batch[i], config_.input_side, static_cast<int>(i));
    scores.push_back(synthetic_class_score(frame_correlation(to_gray(batch[i]))));
  }
  return scores;
}

}  // namespace osc
