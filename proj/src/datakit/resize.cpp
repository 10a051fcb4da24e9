#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "datakit/ops.hpp"

namespace framecast::data {

namespace {

// Catmull-Rom kernel (bicubic with a = -0.5).
double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::fabs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// Per output index: four source taps (clamped) and their weights under
// centre-aligned mapping src = (dst + 0.5) * scale - 0.5.
struct TapPlan {
  std::vector<int> idx;      // 4 per output element
  std::vector<double> wgt;
};

TapPlan plan_taps(int src, int dst) {
  TapPlan plan;
  plan.idx.resize(static_cast<size_t>(dst) * 4);
  plan.wgt.resize(static_cast<size_t>(dst) * 4);
  const double scale = static_cast<double>(src) / dst;
  for (int o = 0; o < dst; ++o) {
    const double s = (o + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(s));
    const double t = s - base;
    const double w[4] = {cubic_weight(t + 1.0), cubic_weight(t), cubic_weight(1.0 - t),
                         cubic_weight(2.0 - t)};
    for (int k = 0; k < 4; ++k) {
      plan.idx[static_cast<size_t>(o) * 4 + k] = std::clamp(base - 1 + k, 0, src - 1);
      plan.wgt[static_cast<size_t>(o) * 4 + k] = w[k];
    }
  }
  return plan;
}

}  // namespace

Frame bicubic_resize(const Frame& f, int target_h, int target_w) {
  f.validate();
  if (target_h < 4 || target_w < 4)
    throw std::invalid_argument("bicubic_resize: target dims must be at least 4");

  const TapPlan px = plan_taps(f.width, target_w);
  const TapPlan py = plan_taps(f.height, target_h);

  Frame out;
  out.height = target_h;
  out.width = target_w;
  out.channels = f.channels;
  out.pixels.resize(static_cast<size_t>(f.channels) * target_h * target_w);

  // Horizontal pass into a double intermediate, then vertical pass.
  std::vector<double> mid(static_cast<size_t>(f.height) * target_w);
  for (int c = 0; c < f.channels; ++c) {
    const float* src = f.plane(c);
    for (int y = 0; y < f.height; ++y) {
      const float* row = src + static_cast<size_t>(y) * f.width;
      double* mrow = mid.data() + static_cast<size_t>(y) * target_w;
      for (int x = 0; x < target_w; ++x) {
        const int* ti = px.idx.data() + static_cast<size_t>(x) * 4;
        const double* tw = px.wgt.data() + static_cast<size_t>(x) * 4;
        mrow[x] = tw[0] * row[ti[0]] + tw[1] * row[ti[1]] + tw[2] * row[ti[2]] + tw[3] * row[ti[3]];
      }
    }
    float* dst = out.plane(c);
    for (int y = 0; y < target_h; ++y) {
      const int* ti = py.idx.data() + static_cast<size_t>(y) * 4;
      const double* tw = py.wgt.data() + static_cast<size_t>(y) * 4;
      const double* m0 = mid.data() + static_cast<size_t>(ti[0]) * target_w;
      const double* m1 = mid.data() + static_cast<size_t>(ti[1]) * target_w;
      const double* m2 = mid.data() + static_cast<size_t>(ti[2]) * target_w;
      const double* m3 = mid.data() + static_cast<size_t>(ti[3]) * target_w;
      float* drow = dst + static_cast<size_t>(y) * target_w;
      for (int x = 0; x < target_w; ++x) {
        const double v = tw[0] * m0[x] + tw[1] * m1[x] + tw[2] * m2[x] + tw[3] * m3[x];
        drow[x] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

Frame gaussian_blur(const Frame& f, double sigma) {
  f.validate();
  if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0) return f;

  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> w(static_cast<size_t>(radius) + 1);
  double norm = 0.0;
  for (int i = 0; i <= radius; ++i) {
    w[static_cast<size_t>(i)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    norm += (i == 0 ? 1.0 : 2.0) * w[static_cast<size_t>(i)];
  }
  for (double& v : w) v /= norm;

  Frame out = f;
  std::vector<double> tmp(static_cast<size_t>(f.height) * f.width);
  for (int c = 0; c < f.channels; ++c) {
    const float* src = f.plane(c);
    // Horizontal, replicated borders.
    for (int y = 0; y < f.height; ++y) {
      const float* row = src + static_cast<size_t>(y) * f.width;
      double* trow = tmp.data() + static_cast<size_t>(y) * f.width;
      for (int x = 0; x < f.width; ++x) {
        double acc = w[0] * row[x];
        for (int i = 1; i <= radius; ++i) {
          const int xl = std::max(0, x - i);
          const int xr = std::min(f.width - 1, x + i);
          acc += w[static_cast<size_t>(i)] * (row[xl] + row[xr]);
        }
        trow[x] = acc;
      }
    }
    // Vertical.
    float* dst = out.plane(c);
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x) {
        double acc = w[0] * tmp[static_cast<size_t>(y) * f.width + x];
        for (int i = 1; i <= radius; ++i) {
          const int yu = std::max(0, y - i);
          const int yd = std::min(f.height - 1, y + i);
          acc += w[static_cast<size_t>(i)] * (tmp[static_cast<size_t>(yu) * f.width + x] +
                                              tmp[static_cast<size_t>(yd) * f.width + x]);
        }
        dst[static_cast<size_t>(y) * f.width + x] =
            static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace framecast::data
