#pragma once

#include <cstring>
#include <vector>

namespace framecast::nn {

// Patch gather/scatter for convolution via GEMM. All convolutions here are
// stride 1 with symmetric zero padding; strided resampling is done by
// dedicated pool/upsample layers. Column layout: rows index (c, ky, kx)
// (plus kt for the temporal case), columns index output positions.

// x: [C, H, W] -> cols: [C*k*k, Ho*Wo], Ho = H + 2p - k + 1.
inline void im2col_2d(const float* x, int c, int h, int w, int k, int p, float* cols) {
  const int ho = h + 2 * p - k + 1;
  const int wo = w + 2 * p - k + 1;
  float* out = cols;
  for (int ci = 0; ci < c; ++ci) {
    const float* plane = x + static_cast<size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy - p + ky;
          if (iy < 0 || iy >= h) {
            std::memset(out, 0, sizeof(float) * static_cast<size_t>(wo));
            out += wo;
            continue;
          }
          const float* row = plane + static_cast<size_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox - p + kx;
            *out++ = (ix < 0 || ix >= w) ? 0.0f : row[ix];
          }
        }
      }
    }
  }
}

// Adjoint of im2col_2d: scatter-add columns back into an image.
inline void col2im_2d(const float* cols, int c, int h, int w, int k, int p, float* x) {
  const int ho = h + 2 * p - k + 1;
  const int wo = w + 2 * p - k + 1;
  std::memset(x, 0, sizeof(float) * static_cast<size_t>(c) * h * w);
  const float* in = cols;
  for (int ci = 0; ci < c; ++ci) {
    float* plane = x + static_cast<size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy - p + ky;
          if (iy < 0 || iy >= h) {
            in += wo;
            continue;
          }
          float* row = plane + static_cast<size_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox - p + kx;
            const float v = *in++;
            if (ix >= 0 && ix < w) row[ix] += v;
          }
        }
      }
    }
  }
}

// x: [C, T, H, W] -> cols: [C*kt*k*k, To*Ho*Wo]. Temporal kernel kt with
// padding pt, spatial kernel k with padding p, all stride 1.
inline void im2col_3d(const float* x, int c, int t, int h, int w, int kt, int k, int pt, int p,
                      float* cols) {
  const int to = t + 2 * pt - kt + 1;
  const int ho = h + 2 * p - k + 1;
  const int wo = w + 2 * p - k + 1;
  float* out = cols;
  for (int ci = 0; ci < c; ++ci) {
    const float* vol = x + static_cast<size_t>(ci) * t * h * w;
    for (int tz = 0; tz < kt; ++tz) {
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          for (int ot = 0; ot < to; ++ot) {
            const int it = ot - pt + tz;
            if (it < 0 || it >= t) {
              std::memset(out, 0, sizeof(float) * static_cast<size_t>(ho) * wo);
              out += static_cast<size_t>(ho) * wo;
              continue;
            }
            const float* plane = vol + static_cast<size_t>(it) * h * w;
            for (int oy = 0; oy < ho; ++oy) {
              const int iy = oy - p + ky;
              if (iy < 0 || iy >= h) {
                std::memset(out, 0, sizeof(float) * static_cast<size_t>(wo));
                out += wo;
                continue;
              }
              const float* row = plane + static_cast<size_t>(iy) * w;
              for (int ox = 0; ox < wo; ++ox) {
                const int ix = ox - p + kx;
                *out++ = (ix < 0 || ix >= w) ? 0.0f : row[ix];
              }
            }
          }
        }
      }
    }
  }
}

inline void col2im_3d(const float* cols, int c, int t, int h, int w, int kt, int k, int pt, int p,
                      float* x) {
  const int to = t + 2 * pt - kt + 1;
  const int ho = h + 2 * p - k + 1;
  const int wo = w + 2 * p - k + 1;
  std::memset(x, 0, sizeof(float) * static_cast<size_t>(c) * t * h * w);
  const float* in = cols;
  for (int ci = 0; ci < c; ++ci) {
    float* vol = x + static_cast<size_t>(ci) * t * h * w;
    for (int tz = 0; tz < kt; ++tz) {
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          for (int ot = 0; ot < to; ++ot) {
            const int it = ot - pt + tz;
            if (it < 0 || it >= t) {
              in += static_cast<size_t>(ho) * wo;
              continue;
            }
            float* plane = vol + static_cast<size_t>(it) * h * w;
            for (int oy = 0; oy < ho; ++oy) {
              const int iy = oy - p + ky;
              if (iy < 0 || iy >= h) {
                in += wo;
                continue;
              }
              float* row = plane + static_cast<size_t>(iy) * w;
              for (int ox = 0; ox < wo; ++ox) {
                const int ix = ox - p + kx;
                const float v = *in++;
                if (ix >= 0 && ix < w) row[ix] += v;
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace framecast::nn
