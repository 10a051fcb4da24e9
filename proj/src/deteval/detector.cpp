#include "deteval/detector.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

#include "core/binio.hpp"
#include "core/errors.hpp"

namespace framecast::det {

ToyDetector::ToyDetector(ToyDetectorParams params) : params_(params) {
  if (!(params_.threshold > 0.0 && params_.threshold < 1.0))
    throw std::invalid_argument("ToyDetector: threshold must lie in (0,1)");
  if (params_.min_area < 1) throw std::invalid_argument("ToyDetector: min_area must be >= 1");
  if (!(params_.fill_cutoff > 0.0 && params_.fill_cutoff <= 1.0))
    throw std::invalid_argument("ToyDetector: fill_cutoff must lie in (0,1]");
}

std::vector<DetectionBox> ToyDetector::detect(const data::Frame& frame, int64_t) {
  frame.validate();
  const std::vector<double> y = data::luma(frame);
  const int h = frame.height, w = frame.width;

  std::vector<int> comp(static_cast<size_t>(h) * w, -1);
  std::vector<DetectionBox> out;
  std::vector<size_t> stack;

  int next_comp = 0;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const size_t si = static_cast<size_t>(sy) * w + sx;
      if (comp[si] >= 0 || y[si] < params_.threshold) continue;

      // Flood fill one component, tracking bbox, area and luma mass.
      int x_min = sx, x_max = sx, y_min = sy, y_max = sy, area = 0;
      double luma_sum = 0.0;
      stack.assign(1, si);
      comp[si] = next_comp;
      while (!stack.empty()) {
        const size_t i = stack.back();
        stack.pop_back();
        const int py = static_cast<int>(i) / w;
        const int px = static_cast<int>(i) % w;
        ++area;
        luma_sum += y[i];
        x_min = std::min(x_min, px);
        x_max = std::max(x_max, px);
        y_min = std::min(y_min, py);
        y_max = std::max(y_max, py);
        const int nb[4][2] = {{px - 1, py}, {px + 1, py}, {px, py - 1}, {px, py + 1}};
        for (const auto& n : nb) {
          if (n[0] < 0 || n[0] >= w || n[1] < 0 || n[1] >= h) continue;
          const size_t ni = static_cast<size_t>(n[1]) * w + n[0];
          if (comp[ni] >= 0 || y[ni] < params_.threshold) continue;
          comp[ni] = next_comp;
          stack.push_back(ni);
        }
      }
      ++next_comp;
      if (area < params_.min_area) continue;

      DetectionBox box;
      box.x_min = x_min;
      box.y_min = y_min;
      box.x_max = x_max + 1.0;
      box.y_max = y_max + 1.0;
      const double fill = static_cast<double>(area) / box.area();
      box.label = fill >= params_.fill_cutoff ? "square" : "circle";
      box.confidence = std::clamp(luma_sum / area, 0.0, 1.0);
      out.push_back(std::move(box));
    }
  }
  return out;
}

ExternalFileDetector::ExternalFileDetector(const std::filesystem::path& csv_path)
    : path_(csv_path), by_frame_(read_detections_csv(csv_path)) {}

std::vector<DetectionBox> ExternalFileDetector::detect(const data::Frame&, int64_t frame_id) {
  const auto it = by_frame_.find(frame_id);
  if (it == by_frame_.end())
    throw MissingDataError("no detections for frame " + std::to_string(frame_id) + " in " +
                           path_.string());
  return it->second;
}

void write_detections_csv(const std::map<int64_t, std::vector<DetectionBox>>& detections,
                          const std::filesystem::path& path) {
  std::string out = "frame_id,class,x_min,y_min,x_max,y_max,confidence\n";
  char line[256];
  for (const auto& [frame_id, boxes] : detections) {
    for (const DetectionBox& b : boxes) {
      std::snprintf(line, sizeof(line), "%lld,%s,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                    static_cast<long long>(frame_id), b.label.c_str(), b.x_min, b.y_min, b.x_max,
                    b.y_max, b.confidence);
      out += line;
    }
  }
  write_file_bytes(path.string(), out);
}

std::map<int64_t, std::vector<DetectionBox>> read_detections_csv(
    const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw MissingDataError("detections file not found: " + path.string());
  std::istringstream in(read_file_bytes(path.string()));
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty detections file: " + path.string());

  std::map<int64_t, std::vector<DetectionBox>> out;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw IoError("bad detections row at line " + std::to_string(line_no) + " in " +
                    path.string());
    try {
      DetectionBox b;
      const int64_t id = std::stoll(fields[0]);
      b.label = fields[1];
      b.x_min = std::stod(fields[2]);
      b.y_min = std::stod(fields[3]);
      b.x_max = std::stod(fields[4]);
      b.y_max = std::stod(fields[5]);
      b.confidence = std::stod(fields[6]);
      out[id].push_back(std::move(b));
    } catch (const std::exception&) {
      throw IoError("unparseable detections row at line " + std::to_string(line_no) + " in " +
                    path.string());
    }
  }
  return out;
}

}  // namespace framecast::det
