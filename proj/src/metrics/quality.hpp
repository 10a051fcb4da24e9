#pragma once

#include <string>
#include <vector>

#include "datakit/frame.hpp"

namespace framecast::qm {

// Pixel-space fidelity metrics, double precision throughout. Frames must
// share dimensions; mismatches throw std::invalid_argument.

double mse(const data::Frame& a, const data::Frame& b);

// 10*log10(max_value^2 / mse); identical frames give +infinity.
double psnr(const data::Frame& a, const data::Frame& b, double max_value = 1.0);

struct SsimOptions {
  int window = 11;        // odd, >= 3
  double sigma = 1.5;     // Gaussian window width
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean structural similarity over valid (fully interior) windows of the
// luma plane. Frames smaller than the window are rejected.
double ssim(const data::Frame& a, const data::Frame& b, const SsimOptions& opt = {});

// Per-step aggregation over a set of predicted/reference sequences. Both
// PSNR conventions are reported: the mean of per-sequence PSNR values and
// the PSNR of the per-step mean MSE.
struct StepMetrics {
  double mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double psnr_of_mean_mse = 0.0;
};

struct MetricReport {
  std::string label;                   // pipeline name
  std::vector<StepMetrics> per_step;   // index 0 is one step ahead
  StepMetrics averages;                // plain means of the per-step rows
  int sequence_count = 0;
};

MetricReport per_frame_report(const std::vector<std::vector<data::Frame>>& predicted,
                              const std::vector<std::vector<data::Frame>>& reference,
                              const std::string& label);

}  // namespace framecast::qm
