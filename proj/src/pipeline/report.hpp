#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deteval/evaluate.hpp"
#include "metrics/quality.hpp"

namespace framecast::pipe {

// Report artifacts comparing pipelines on the same test windows: per-step
// CSVs, a plain-text summary table and per-step line charts. All number
// formatting is fixed so identical inputs reproduce identical bytes.

// Formats with a fixed decimal count; non-finite values become inf/-inf/nan.
std::string fmt_double(double v, int digits);

// Columns: pipeline,step,mse,psnr,psnr_of_mean_mse,ssim. Steps count from 1
// and each pipeline closes with a "mean" row.
void write_metrics_csv(const std::vector<qm::MetricReport>& reports,
                       const std::filesystem::path& file);

// Columns: pipeline,class,step,ap,tp,fp,fn. An undefined AP (no ground
// truth for the class at that step) leaves the cell empty.
void write_ap_csv(const std::vector<det::APReport>& reports, const std::filesystem::path& file);

std::string summary_table(const std::vector<qm::MetricReport>& metrics,
                          const std::vector<det::APReport>& aps);

// Step-indexed line chart, one series per pipeline; x counts 1..n.
class LineChart {
 public:
  LineChart(std::string title, std::string y_label);
  void add(const std::string& label, const std::vector<double>& ys);
  void save(const std::filesystem::path& png) const;

 private:
  std::string title_, y_label_;
  struct Series {
    std::string label;
    std::vector<double> ys;
  };
  std::vector<Series> series_;
};

// Writes everything into dir and returns the files written: metrics CSV,
// summary table, per-metric charts, and when AP rows exist, the AP CSV and
// one chart per class.
std::vector<std::filesystem::path> write_full_report(const std::filesystem::path& dir,
                                                     const std::vector<qm::MetricReport>& metrics,
                                                     const std::vector<det::APReport>& aps);

}  // namespace framecast::pipe
