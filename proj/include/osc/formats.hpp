#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "osc/dataprep.hpp"
#include "osc/detector.hpp"
#include "osc/evaluator.hpp"

namespace osc {

/// Malformed input file; the message names the file and line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-delimited JSON, one record per image:
///   {"image_id": "...", "boxes": [{"x":..,"y":..,"w":..,"h":..}, ...],
///    "ellipses": [{"cx":..,"cy":..,"ra":..,"rb":..,"angle":..}, ...]}
/// "ellipses" is optional. Blank lines are skipped.
std::vector<Annotation> read_annotations_jsonl(std::istream& in, const std::string& source = "<stream>");
std::vector<Annotation> read_annotations_jsonl(const std::filesystem::path& path);
void write_annotations_jsonl(std::ostream& out, std::span<const Annotation> annotations);

/// FDDB ellipse list: image path line, count line, then one
/// "major minor angle cx cy 1" line per face. The major radius is vertical
/// when the angle is 0; angles are radians.
std::vector<Annotation> read_fddb_ellipses(std::istream& in, const std::string& source = "<stream>");
std::vector<Annotation> read_fddb_ellipses(const std::filesystem::path& path);

/// Ellipse as written in FDDB files: (major, minor, angle) <-> (ra, rb, angle).
Ellipse ellipse_from_fddb(double major, double minor, double angle, double cx, double cy);

/// One image path per non-blank line.
std::vector<std::string> read_fold_list(const std::filesystem::path& path);

struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

/// FDDB rectangle layout: image id line, count line, then "x y w h score".
void write_fddb_detections(std::ostream& out, std::span<const ImageDetections> images);
std::vector<ImageDetections> read_fddb_detections(std::istream& in,
                                                  const std::string& source = "<stream>");

/// {"image_id": "...", "detections": [{"x":..,"y":..,"w":..,"h":..,"score":..}]}
void write_detections_jsonl(std::ostream& out, std::span<const ImageDetections> images);
std::vector<ImageDetections> read_detections_jsonl(std::istream& in,
                                                   const std::string& source = "<stream>");

/// Picks the reader by extension: .jsonl/.json as JSON lines, anything else
/// as the FDDB text layout.
std::vector<ImageDetections> read_detections(const std::filesystem::path& path);

/// "threshold,fp_count,tpr" header and one row per point.
void write_curve_csv(std::ostream& out, const EvalCurve& curve);

/// "threshold,recall,precision" header and one row per point.
void write_pr_csv(std::ostream& out, std::span<const PrPoint> points);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace osc
