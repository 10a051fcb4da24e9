#include "pipeline/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "core/errors.hpp"
#include "pipeline/png.hpp"

namespace framecast::pipe {

namespace {

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + file.string());
}

std::string csv_metrics(const std::vector<qm::MetricReport>& reports) {
  std::string s = "pipeline,step,mse,psnr,psnr_of_mean_mse,ssim\n";
  auto row = [&s](const std::string& label, const std::string& step, const qm::StepMetrics& m) {
    s += label + "," + step + "," + fmt_double(m.mse, 8) + "," + fmt_double(m.psnr, 4) + "," +
         fmt_double(m.psnr_of_mean_mse, 4) + "," + fmt_double(m.ssim, 6) + "\n";
  };
  for (const qm::MetricReport& r : reports) {
    for (size_t i = 0; i < r.per_step.size(); ++i)
      row(r.label, std::to_string(i + 1), r.per_step[i]);
    row(r.label, "mean", r.averages);
  }
  return s;
}

std::string csv_ap(const std::vector<det::APReport>& reports) {
  std::string s = "pipeline,class,step,ap,tp,fp,fn\n";
  for (const det::APReport& r : reports)
    for (const det::ApRow& row : r.rows)
      s += r.pipeline + "," + row.cls + "," + std::to_string(row.step) + "," +
           (row.ap ? fmt_double(*row.ap, 6) : std::string()) + "," + std::to_string(row.tp) +
           "," + std::to_string(row.fp) + "," + std::to_string(row.fn) + "\n";
  return s;
}

// Mean of the defined APs across a report's rows, or nullopt if none are.
std::optional<double> mean_ap(const det::APReport& r) {
  double sum = 0.0;
  int n = 0;
  for (const det::ApRow& row : r.rows)
    if (row.ap) {
      sum += *row.ap;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / n;
}

constexpr uint32_t kPalette[] = {0xd62728, 0x1f77b4, 0x2ca02c, 0x9467bd, 0xff7f0e, 0x8c564b};
constexpr uint32_t kAxis = 0x404040;
constexpr uint32_t kGridline = 0xd8d8d8;

}  // namespace

std::string fmt_double(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_metrics_csv(const std::vector<qm::MetricReport>& reports,
                       const std::filesystem::path& file) {
  write_text_file(file, csv_metrics(reports));
}

void write_ap_csv(const std::vector<det::APReport>& reports,
                  const std::filesystem::path& file) {
  write_text_file(file, csv_ap(reports));
}

std::string summary_table(const std::vector<qm::MetricReport>& metrics,
                          const std::vector<det::APReport>& aps) {
  std::string s;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %6s %12s %10s %10s %8s\n", "pipeline", "steps", "mse",
                "psnr", "ssim", "mean_ap");
  s += line;
  for (const qm::MetricReport& m : metrics) {
    std::string ap = "-";
    for (const det::APReport& a : aps)
      if (a.pipeline == m.label) {
        if (const std::optional<double> v = mean_ap(a)) ap = fmt_double(*v, 4);
        break;
      }
    std::snprintf(line, sizeof line, "%-16s %6zu %12s %10s %10s %8s\n", m.label.c_str(),
                  m.per_step.size(), fmt_double(m.averages.mse, 8).c_str(),
                  fmt_double(m.averages.psnr, 4).c_str(), fmt_double(m.averages.ssim, 6).c_str(),
                  ap.c_str());
    s += line;
  }
  return s;
}

LineChart::LineChart(std::string title, std::string y_label)
    : title_(std::move(title)), y_label_(std::move(y_label)) {}

void LineChart::add(const std::string& label, const std::vector<double>& ys) {
  series_.push_back({label, ys});
}

void LineChart::save(const std::filesystem::path& png) const {
  const int width = 640, height = 400;
  const int left = 76, right = width - 20, top = 40, bottom = height - 40;
  Canvas c(width, height);

  // y range over finite values, padded; x is the 1-based step index
  double ymin = 0.0, ymax = 1.0;
  bool seen = false;
  size_t steps = 0;
  for (const Series& s : series_) {
    steps = std::max(steps, s.ys.size());
    for (double y : s.ys)
      if (std::isfinite(y)) {
        ymin = seen ? std::min(ymin, y) : y;
        ymax = seen ? std::max(ymax, y) : y;
        seen = true;
      }
  }
  if (!seen) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto x_at = [&](size_t i) {
    if (steps <= 1) return (left + right) / 2;
    return left + static_cast<int>(std::lround(static_cast<double>(i) / (steps - 1) *
                                               (right - left)));
  };
  auto y_at = [&](double v) {
    return bottom - static_cast<int>(std::lround((v - ymin) / (ymax - ymin) * (bottom - top)));
  };

  c.text(left, 10, title_, 0x000000);
  c.text(8, top - 18, y_label_, kAxis);

  // horizontal gridlines with tick labels
  const int y_ticks = 5;
  for (int t = 0; t <= y_ticks; ++t) {
    const double v = ymin + (ymax - ymin) * t / y_ticks;
    const int y = y_at(v);
    c.line(left, y, right, y, kGridline);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    c.text(left - 6 - Canvas::text_width(buf), y - 3, buf, kAxis);
  }
  // x ticks at step numbers
  const size_t x_step = steps > 8 ? (steps + 7) / 8 : 1;
  for (size_t i = 0; i < steps; i += x_step) {
    const int x = x_at(i);
    c.line(x, bottom, x, bottom + 4, kAxis);
    const std::string label = std::to_string(i + 1);
    c.text(x - Canvas::text_width(label) / 2, bottom + 8, label, kAxis);
  }
  c.text((left + right) / 2 - Canvas::text_width("STEP") / 2, height - 14, "STEP", kAxis);
  c.line(left, top, left, bottom, kAxis);
  c.line(left, bottom, right, bottom, kAxis);

  for (size_t si = 0; si < series_.size(); ++si) {
    const uint32_t color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
    const std::vector<double>& ys = series_[si].ys;
    int px = 0, py = 0;
    bool have_prev = false;
    for (size_t i = 0; i < ys.size(); ++i) {
      if (!std::isfinite(ys[i])) {
        have_prev = false;  // break the line at undefined points
        continue;
      }
      const int x = x_at(i), y = y_at(ys[i]);
      if (have_prev) c.line(px, py, x, y, color);
      c.marker(x, y, color);
      px = x;
      py = y;
      have_prev = true;
    }
    // legend, top-right corner of the plot area
    const int ly = top + 6 + static_cast<int>(si) * 12;
    const int lx = right - 120;
    c.line(lx, ly + 3, lx + 16, ly + 3, color);
    c.text(lx + 22, ly, series_[si].label, 0x000000);
  }
  c.save_png(png);
}

std::vector<std::filesystem::path> write_full_report(
    const std::filesystem::path& dir, const std::vector<qm::MetricReport>& metrics,
    const std::vector<det::APReport>& aps) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&written](const std::filesystem::path& p) { written.push_back(p); };

  write_metrics_csv(metrics, dir / "metrics.csv");
  emit(dir / "metrics.csv");
  write_text_file(dir / "summary.txt", summary_table(metrics, aps));
  emit(dir / "summary.txt");

  struct MetricField {
    const char* name;
    double qm::StepMetrics::*field;
  };
  const MetricField fields[] = {
      {"mse", &qm::StepMetrics::mse},
      {"psnr", &qm::StepMetrics::psnr},
      {"ssim", &qm::StepMetrics::ssim},
  };
  for (const MetricField& f : fields) {
    LineChart chart(std::string(f.name) + " BY PREDICTION STEP", f.name);
    for (const qm::MetricReport& m : metrics) {
      std::vector<double> ys;
      for (const qm::StepMetrics& s : m.per_step) ys.push_back(s.*(f.field));
      chart.add(m.label, ys);
    }
    const std::filesystem::path p = dir / (std::string(f.name) + "_by_step.png");
    chart.save(p);
    emit(p);
  }

  bool any_rows = false;
  for (const det::APReport& a : aps) any_rows = any_rows || !a.rows.empty();
  if (any_rows) {
    write_ap_csv(aps, dir / "ap.csv");
    emit(dir / "ap.csv");
    std::set<std::string> classes;
    for (const det::APReport& a : aps)
      for (const det::ApRow& r : a.rows) classes.insert(r.cls);
    for (const std::string& cls : classes) {
      LineChart chart("AP (" + cls + ") BY PREDICTION STEP", "ap");
      for (const det::APReport& a : aps) {
        std::map<int, double> by_step;
        int max_step = 0;
        for (const det::ApRow& r : a.rows)
          if (r.cls == cls) {
            max_step = std::max(max_step, r.step);
            if (r.ap) by_step[r.step] = *r.ap;
          }
        std::vector<double> ys(static_cast<size_t>(max_step),
                               std::numeric_limits<double>::quiet_NaN());
        for (const auto& [step, ap] : by_step) ys[step - 1] = ap;
        chart.add(a.pipeline, ys);
      }
      const std::filesystem::path p = dir / ("ap_" + cls + "_by_step.png");
      chart.save(p);
      emit(p);
    }
  }
  return written;
}

}  // namespace framecast::pipe
