#include "osc/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace osc {

namespace {

void write_mat(const std::filesystem::path& path, const cv::Mat& mat) {
  // PNG encoding is deterministic for fixed parameters.
  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6};
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat, params);
  } catch (const cv::Exception& e) {
    throw ImageIoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw ImageIoError("cannot write " + path.string());
}

std::string axis_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw ImageIoError("cannot decode " + path.string() + ": " + e.what());
  }
  if (bgr.empty()) throw ImageIoError("cannot decode " + path.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image out(rgb.cols, rgb.rows);
  for (int y = 0; y < rgb.rows; ++y)
    std::memcpy(out.bytes().data() + static_cast<std::size_t>(y) * rgb.cols * Image::kChannels,
                rgb.ptr<std::uint8_t>(y), static_cast<std::size_t>(rgb.cols) * Image::kChannels);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (image.empty()) throw ImageIoError("cannot write empty image to " + path.string());
  cv::Mat rgb(image.height(), image.width(), CV_8UC3,
              const_cast<std::uint8_t*>(image.bytes().data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  write_mat(path, bgr);
}

void write_heatmap_png(const std::filesystem::path& path, const Heatmap& heatmap,
                       std::optional<int> levels) {
  Heatmap byte = heatmap.scale() == HeatmapScale::byte ? heatmap : normalize_byte(heatmap);
  if (levels) byte = quantize(byte, *levels);
  cv::Mat gray(byte.height(), byte.width(), CV_8UC1);
  for (int y = 0; y < byte.height(); ++y)
    for (int x = 0; x < byte.width(); ++x)
      gray.at<std::uint8_t>(y, x) =
          static_cast<std::uint8_t>(std::clamp(std::lround(byte.at(x, y)), 0L, 255L));
  write_mat(path, gray);
}

void write_plot_png(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
                    const std::string& x_label, const std::string& y_label, int width,
                    int height) {
  constexpr int kLeft = 60, kRight = 20, kTop = 20, kBottom = 50;
  if (width <= kLeft + kRight || height <= kTop + kBottom)
    throw std::invalid_argument("plot too small");
  cv::Mat img(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
  double x_max = 0.0;
  for (const auto& s : series)
    for (double v : s.x) x_max = std::max(x_max, v);
  if (x_max <= 0.0) x_max = 1.0;
  const int pw = width - kLeft - kRight;
  const int ph = height - kTop - kBottom;
  auto to_px = [&](double x, double y) {
    return cv::Point(kLeft + static_cast<int>(std::lround(x / x_max * pw)),
                     kTop + ph - static_cast<int>(std::lround(std::clamp(y, 0.0, 1.0) * ph)));
  };
  const cv::Scalar black(0, 0, 0), grid(220, 220, 220);
  for (int k = 0; k <= 4; ++k) {
    const double f = k / 4.0;
    cv::line(img, to_px(0, f), to_px(x_max, f), grid, 1);
    cv::line(img, to_px(f * x_max, 0), to_px(f * x_max, 1), grid, 1);
    cv::putText(img, axis_text(f), {5, to_px(0, f).y + 4}, cv::FONT_HERSHEY_SIMPLEX, 0.4, black);
    cv::putText(img, axis_text(f * x_max), {to_px(f * x_max, 0).x - 10, kTop + ph + 15},
                cv::FONT_HERSHEY_SIMPLEX, 0.4, black);
  }
  cv::rectangle(img, to_px(0, 1), to_px(x_max, 0), black, 1);
  cv::putText(img, x_label, {kLeft + pw / 2 - 40, height - 10}, cv::FONT_HERSHEY_SIMPLEX, 0.5, black);
  cv::putText(img, y_label, {5, 14}, cv::FONT_HERSHEY_SIMPLEX, 0.5, black);

  static const std::array<cv::Scalar, 6> kColors{
      cv::Scalar(200, 80, 0), cv::Scalar(0, 0, 200), cv::Scalar(0, 150, 0),
      cv::Scalar(150, 0, 150), cv::Scalar(0, 140, 220), cv::Scalar(90, 90, 90)};
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const cv::Scalar color = kColors[i % kColors.size()];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t k = 1; k < n; ++k)
      cv::line(img, to_px(s.x[k - 1], s.y[k - 1]), to_px(s.x[k], s.y[k]), color, 2, cv::LINE_AA);
    if (n == 1) cv::circle(img, to_px(s.x[0], s.y[0]), 3, color, cv::FILLED);
    const int ly = kTop + 15 + static_cast<int>(i) * 15;
    cv::line(img, {kLeft + pw - 150, ly - 4}, {kLeft + pw - 130, ly - 4}, color, 2);
    cv::putText(img, s.label, {kLeft + pw - 125, ly}, cv::FONT_HERSHEY_SIMPLEX, 0.4, black);
  }
  write_mat(path, img);
}

}  // namespace osc
