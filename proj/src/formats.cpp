#include "osc/formats.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace osc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw FormatError(source + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

// Reads the next non-blank line, counting every line consumed.
bool next_line(std::istream& in, std::string& out, std::size_t& line_no) {
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    out = trim(raw);
    if (!out.empty()) return true;
  }
  return false;
}

std::vector<double> parse_numbers(const std::string& line, const std::string& source,
                                  std::size_t line_no) {
  std::istringstream ss(line);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
      fail(source, line_no, "not a number: '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::size_t parse_count(const std::string& line, const std::string& source, std::size_t line_no) {
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), n);
  if (ec != std::errc() || ptr != line.data() + line.size())
    fail(source, line_no, "expected a count, got '" + line + "'");
  return n;
}

double number(const json& j, const char* key, const std::string& source, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) fail(source, line_no, std::string("missing number '") + key + "'");
  return it->get<double>();
}

BoundingBox box_from_json(const json& j, const std::string& source, std::size_t line_no) {
  const BoundingBox b{number(j, "x", source, line_no), number(j, "y", source, line_no),
                      number(j, "w", source, line_no), number(j, "h", source, line_no)};
  if (!b.valid()) fail(source, line_no, "box must have positive finite size");
  return b;
}

json box_to_json(const BoundingBox& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

std::string image_id_of(const json& rec, const std::string& source, std::size_t line_no) {
  const auto it = rec.find("image_id");
  if (it == rec.end() || !it->is_string()) fail(source, line_no, "missing string 'image_id'");
  return it->get<std::string>();
}

const json* array_field(const json& rec, const char* key, const std::string& source,
                        std::size_t line_no) {
  const auto it = rec.find(key);
  if (it == rec.end()) return nullptr;
  if (!it->is_array()) fail(source, line_no, std::string("'") + key + "' must be an array");
  return &*it;
}

template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn fn) {
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line, line_no)) {
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(source, line_no, e.what());
    }
    if (!rec.is_object()) fail(source, line_no, "expected a JSON object");
    fn(rec, line_no);
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

std::vector<Annotation> read_annotations_jsonl(std::istream& in, const std::string& source) {
  std::vector<Annotation> out;
  for_each_json_line(in, source, [&](const json& rec, std::size_t line_no) {
    Annotation a{image_id_of(rec, source, line_no), {}};
    if (const json* boxes = array_field(rec, "boxes", source, line_no))
      for (const auto& b : *boxes) a.regions.emplace_back(box_from_json(b, source, line_no));
    if (const json* ellipses = array_field(rec, "ellipses", source, line_no))
      for (const auto& e : *ellipses) {
        const Ellipse el{number(e, "cx", source, line_no), number(e, "cy", source, line_no),
                         number(e, "ra", source, line_no), number(e, "rb", source, line_no),
                         e.contains("angle") ? number(e, "angle", source, line_no) : 0.0};
        if (!(el.ra > 0.0 && el.rb > 0.0)) fail(source, line_no, "ellipse radii must be > 0");
        a.regions.emplace_back(el);
      }
    out.push_back(std::move(a));
  });
  return out;
}

std::vector<Annotation> read_annotations_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_annotations_jsonl(in, path.string());
}

void write_annotations_jsonl(std::ostream& out, std::span<const Annotation> annotations) {
  for (const auto& a : annotations) {
    json boxes = json::array();
    json ellipses = json::array();
    for (const auto& r : a.regions) {
      if (const auto* b = std::get_if<BoundingBox>(&r)) {
        boxes.push_back(box_to_json(*b));
      } else {
        const auto& e = std::get<Ellipse>(r);
        ellipses.push_back({{"cx", e.cx}, {"cy", e.cy}, {"ra", e.ra}, {"rb", e.rb}, {"angle", e.angle}});
      }
    }
    json rec{{"image_id", a.image_id}, {"boxes", boxes}};
    if (!ellipses.empty()) rec["ellipses"] = ellipses;
    out << rec.dump() << '\n';
  }
}

Ellipse ellipse_from_fddb(double major, double minor, double angle, double cx, double cy) {
  // FDDB rotates the major axis from the x axis; here the unrotated major
  // axis (ra) runs along y.
  return {cx, cy, major, minor, angle - std::numbers::pi / 2.0};
}

std::vector<Annotation> read_fddb_ellipses(std::istream& in, const std::string& source) {
  std::vector<Annotation> out;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line, line_no)) {
    Annotation a{line, {}};
    if (!next_line(in, line, line_no)) fail(source, line_no, "missing face count for " + a.image_id);
    const std::size_t n = parse_count(line, source, line_no);
    for (std::size_t k = 0; k < n; ++k) {
      if (!next_line(in, line, line_no)) fail(source, line_no, "truncated ellipse list for " + a.image_id);
      const auto v = parse_numbers(line, source, line_no);
      if (v.size() < 5) fail(source, line_no, "expected 'major minor angle cx cy 1'");
      if (!(v[0] > 0.0 && v[1] > 0.0)) fail(source, line_no, "ellipse radii must be > 0");
      a.regions.emplace_back(ellipse_from_fddb(v[0], v[1], v[2], v[3], v[4]));
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Annotation> read_fddb_ellipses(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_fddb_ellipses(in, path.string());
}

std::vector<std::string> read_fold_list(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line, line_no)) out.push_back(line);
  return out;
}

void write_fddb_detections(std::ostream& out, std::span<const ImageDetections> images) {
  for (const auto& img : images) {
    out << img.image_id << '\n' << img.detections.size() << '\n';
    for (const auto& d : img.detections)
      out << format_number(d.box.x) << ' ' << format_number(d.box.y) << ' ' << format_number(d.box.w)
          << ' ' << format_number(d.box.h) << ' ' << format_number(d.score) << '\n';
  }
}

std::vector<ImageDetections> read_fddb_detections(std::istream& in, const std::string& source) {
  std::vector<ImageDetections> out;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line, line_no)) {
    ImageDetections img{line, {}};
    if (!next_line(in, line, line_no)) fail(source, line_no, "missing detection count for " + img.image_id);
    const std::size_t n = parse_count(line, source, line_no);
    for (std::size_t k = 0; k < n; ++k) {
      if (!next_line(in, line, line_no)) fail(source, line_no, "truncated detections for " + img.image_id);
      const auto v = parse_numbers(line, source, line_no);
      if (v.size() != 5) fail(source, line_no, "expected 'x y w h score'");
      const BoundingBox b{v[0], v[1], v[2], v[3]};
      if (!b.valid()) fail(source, line_no, "box must have positive finite size");
      img.detections.push_back({b, v[4]});
    }
    out.push_back(std::move(img));
  }
  return out;
}

void write_detections_jsonl(std::ostream& out, std::span<const ImageDetections> images) {
  for (const auto& img : images) {
    json dets = json::array();
    for (const auto& d : img.detections) {
      json j = box_to_json(d.box);
      j["score"] = d.score;
      dets.push_back(std::move(j));
    }
    out << json{{"image_id", img.image_id}, {"detections", dets}}.dump() << '\n';
  }
}

std::vector<ImageDetections> read_detections_jsonl(std::istream& in, const std::string& source) {
  std::vector<ImageDetections> out;
  for_each_json_line(in, source, [&](const json& rec, std::size_t line_no) {
    ImageDetections img{image_id_of(rec, source, line_no), {}};
    if (const json* dets = array_field(rec, "detections", source, line_no))
      for (const auto& d : *dets)
        img.detections.push_back({box_from_json(d, source, line_no), number(d, "score", source, line_no)});
    out.push_back(std::move(img));
  });
  return out;
}

std::vector<ImageDetections> read_detections(const std::filesystem::path& path) {
  auto in = open_input(path);
  const auto ext = path.extension();
  if (ext == ".jsonl" || ext == ".json") return read_detections_jsonl(in, path.string());
  return read_fddb_detections(in, path.string());
}

void write_curve_csv(std::ostream& out, const EvalCurve& curve) {
  out << "threshold,fp_count,tpr\n";
  for (const auto& p : curve.points)
    out << format_number(p.threshold) << ',' << p.fp_count << ',' << format_number(p.tpr) << '\n';
}

void write_pr_csv(std::ostream& out, std::span<const PrPoint> points) {
  out << "threshold,recall,precision\n";
  for (const auto& p : points)
    out << format_number(p.threshold) << ',' << format_number(p.recall) << ','
        << format_number(p.precision) << '\n';
}

}  // namespace osc
