#include "enhancer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace framecast::enh {

double checkerboard_score(const data::Frame& f, int period) {
  f.validate();
  if (period < 2) throw std::invalid_argument("checkerboard_score: period must be >= 2");
  const int h = f.height, w = f.width;
  if (h % period != 0 || w % period != 0)
    throw std::invalid_argument("checkerboard_score: dimensions must be divisible by the period");

  const std::vector<double> v = data::luma(f);
  const double n = static_cast<double>(h) * w;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ac = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ac += d * d;
  }
  if (ac <= 0.0) return 0.0;

  const int fy = h / period, fx = w / period;
  std::set<std::pair<int, int>> bins;
  for (int by : {0, fy, (h - fy) % h})
    for (int bx : {0, fx, (w - fx) % w}) {
      if (by == 0 && bx == 0) continue;
      bins.insert({by, bx});
    }

  // Direct DFT at the handful of target bins; Parseval converts |X|^2 / N
  // into the spatial energy each bin carries. Non-DC bins ignore the mean
  // by construction.
  const double tau = 2.0 * std::acos(-1.0);
  double target = 0.0;
  for (const auto& [by, bx] : bins) {
    double re = 0.0, im = 0.0;
    for (int y = 0; y < h; ++y) {
      const double wy = tau * by * y / h;
      for (int x = 0; x < w; ++x) {
        const double ang = wy + tau * bx * x / w;
        const double val = v[static_cast<size_t>(y) * w + x];
        re += val * std::cos(ang);
        im -= val * std::sin(ang);
      }
    }
    target += (re * re + im * im) / n;
  }
  return std::min(1.0, target / ac);
}

}  // namespace framecast::enh
