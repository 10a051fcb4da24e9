#include "metrics/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace framecast::qm {

namespace {

void require_comparable(const data::Frame& a, const data::Frame& b) {
  a.validate();
  b.validate();
  if (!a.same_dims(b))
    throw std::invalid_argument("metrics: frames must share dimensions");
}

}  // namespace

double mse(const data::Frame& a, const data::Frame& b) {
  require_comparable(a, b);
  double acc = 0.0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.pixels.size());
}

double psnr(const data::Frame& a, const data::Frame& b, double max_value) {
  if (!(max_value > 0.0)) throw std::invalid_argument("psnr: max_value must be positive");
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / m);
}

double ssim(const data::Frame& a, const data::Frame& b, const SsimOptions& opt) {
  require_comparable(a, b);
  if (opt.window < 3 || opt.window % 2 == 0)
    throw std::invalid_argument("ssim: window must be odd and >= 3");
  if (a.height < opt.window || a.width < opt.window)
    throw std::invalid_argument("ssim: frames smaller than the window");
  if (!(opt.sigma > 0.0) || !(opt.dynamic_range > 0.0))
    throw std::invalid_argument("ssim: sigma and dynamic_range must be positive");

  const std::vector<double> xa = data::luma(a);
  const std::vector<double> xb = data::luma(b);
  const int w = a.width, h = a.height, win = opt.window, r = win / 2;

  // Normalized separable Gaussian window.
  std::vector<double> g(static_cast<size_t>(win));
  double gn = 0.0;
  for (int i = 0; i < win; ++i) {
    const double d = i - r;
    g[static_cast<size_t>(i)] = std::exp(-0.5 * d * d / (opt.sigma * opt.sigma));
    gn += g[static_cast<size_t>(i)];
  }
  for (double& v : g) v /= gn;

  const double c1 = opt.k1 * opt.k1 * opt.dynamic_range * opt.dynamic_range;
  const double c2 = opt.k2 * opt.k2 * opt.dynamic_range * opt.dynamic_range;

  double total = 0.0;
  int count = 0;
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      double ma = 0.0, mb = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const double wy = g[static_cast<size_t>(dy + r)];
        const size_t row = static_cast<size_t>(y + dy) * w + x;
        for (int dx = -r; dx <= r; ++dx) {
          const double wgt = wy * g[static_cast<size_t>(dx + r)];
          ma += wgt * xa[row + dx];
          mb += wgt * xb[row + dx];
        }
      }
      double va = 0.0, vb = 0.0, cov = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        const double wy = g[static_cast<size_t>(dy + r)];
        const size_t row = static_cast<size_t>(y + dy) * w + x;
        for (int dx = -r; dx <= r; ++dx) {
          const double wgt = wy * g[static_cast<size_t>(dx + r)];
          const double da = xa[row + dx] - ma;
          const double db = xb[row + dx] - mb;
          va += wgt * da * da;
          vb += wgt * db * db;
          cov += wgt * da * db;
        }
      }
      total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

MetricReport per_frame_report(const std::vector<std::vector<data::Frame>>& predicted,
                              const std::vector<std::vector<data::Frame>>& reference,
                              const std::string& label) {
  if (predicted.empty() || predicted.size() != reference.size())
    throw std::invalid_argument("per_frame_report: need matching non-empty sequence sets");
  const size_t steps = predicted.front().size();
  if (steps == 0) throw std::invalid_argument("per_frame_report: empty sequences");
  for (size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i].size() != steps || reference[i].size() != steps)
      throw std::invalid_argument("per_frame_report: sequences must share step count");

  // Small frames get the largest odd window that still fits so low
  // resolutions stay measurable; ssim() itself stays strict.
  SsimOptions ssim_opt;
  for (const std::vector<data::Frame>& seq : predicted)
    for (const data::Frame& f : seq) {
      const int fit = std::min(f.height, f.width) | 1;
      ssim_opt.window = std::min(ssim_opt.window, fit > std::min(f.height, f.width) ? fit - 2 : fit);
    }
  ssim_opt.window = std::max(ssim_opt.window, 3);

  MetricReport rep;
  rep.label = label;
  rep.sequence_count = static_cast<int>(predicted.size());
  rep.per_step.resize(steps);
  for (size_t s = 0; s < steps; ++s) {
    StepMetrics& sm = rep.per_step[s];
    for (size_t i = 0; i < predicted.size(); ++i) {
      sm.mse += mse(predicted[i][s], reference[i][s]);
      sm.psnr += psnr(predicted[i][s], reference[i][s]);
      sm.ssim += ssim(predicted[i][s], reference[i][s], ssim_opt);
    }
    const double n = static_cast<double>(predicted.size());
    sm.mse /= n;
    sm.psnr /= n;
    sm.ssim /= n;
    sm.psnr_of_mean_mse = sm.mse == 0.0 ? std::numeric_limits<double>::infinity()
                                        : 10.0 * std::log10(1.0 / sm.mse);
  }
  for (const StepMetrics& sm : rep.per_step) {
    rep.averages.mse += sm.mse;
    rep.averages.psnr += sm.psnr;
    rep.averages.ssim += sm.ssim;
    rep.averages.psnr_of_mean_mse += sm.psnr_of_mean_mse;
  }
  const double ns = static_cast<double>(steps);
  rep.averages.mse /= ns;
  rep.averages.psnr /= ns;
  rep.averages.ssim /= ns;
  rep.averages.psnr_of_mean_mse /= ns;
  return rep;
}

}  // namespace framecast::qm
