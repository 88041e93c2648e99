#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "osc/heatmap.hpp"
#include "osc/image.hpp"

namespace osc {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decodes PNG/JPEG (anything OpenCV reads) into RGB. Gray and alpha inputs
/// are converted.
Image read_image(const std::filesystem::path& path);

/// Lossless RGB PNG.
void write_png(const std::filesystem::path& path, const Image& image);

/// 8-bit gray PNG. Raw maps are min-max normalized first; with `levels` the
/// byte map is quantized to that many gray levels.
void write_heatmap_png(const std::filesystem::path& path, const Heatmap& heatmap,
                       std::optional<int> levels = std::nullopt);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot with axes scaled to the data; y is fixed to [0, 1].
void write_plot_png(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                    const std::string& x_label, const std::string& y_label, int width = 640,
                    int height = 480);

}  // namespace osc
