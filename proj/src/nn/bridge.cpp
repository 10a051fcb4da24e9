#include "nn/bridge.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace framecast::nn {

Tensor image_batch(const std::vector<data::Frame>& frames) {
  if (frames.empty()) throw std::invalid_argument("image_batch: no frames");
  const data::Frame& f0 = frames.front();
  Tensor t(Shape{static_cast<int>(frames.size()), f0.channels, f0.height, f0.width});
  const size_t stride = f0.pixels.size();
  for (size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].same_dims(f0))
      throw std::invalid_argument("image_batch: frames must share dimensions");
    std::memcpy(t.data() + i * stride, frames[i].pixels.data(), stride * sizeof(float));
  }
  return t;
}

std::vector<data::Frame> image_unbatch(const Tensor& t) {
  if (t.shape.rank != 4) throw std::invalid_argument("image_unbatch: expected (N,C,H,W)");
  std::vector<data::Frame> out(static_cast<size_t>(t.shape[0]));
  const size_t stride = static_cast<size_t>(t.shape[1]) * t.shape[2] * t.shape[3];
  for (int i = 0; i < t.shape[0]; ++i) {
    data::Frame& f = out[static_cast<size_t>(i)];
    f.channels = t.shape[1];
    f.height = t.shape[2];
    f.width = t.shape[3];
    f.pixels.assign(t.data() + i * stride, t.data() + (i + 1) * stride);
  }
  return out;
}

Tensor video_batch(const std::vector<std::vector<data::Frame>>& sequences) {
  if (sequences.empty() || sequences.front().empty())
    throw std::invalid_argument("video_batch: no frames");
  const data::Frame& f0 = sequences.front().front();
  const int n = static_cast<int>(sequences.size());
  const int tlen = static_cast<int>(sequences.front().size());
  Tensor t(Shape{n, f0.channels, tlen, f0.height, f0.width});
  const size_t plane = static_cast<size_t>(f0.height) * f0.width;
  for (int i = 0; i < n; ++i) {
    const auto& seq = sequences[static_cast<size_t>(i)];
    if (static_cast<int>(seq.size()) != tlen)
      throw std::invalid_argument("video_batch: sequences must share length");
    for (int ti = 0; ti < tlen; ++ti) {
      const data::Frame& f = seq[static_cast<size_t>(ti)];
      if (!f.same_dims(f0))
        throw std::invalid_argument("video_batch: frames must share dimensions");
      for (int c = 0; c < f0.channels; ++c) {
        float* dst = t.data() +
                     (((static_cast<size_t>(i) * f0.channels + c) * tlen + ti) * plane);
        std::memcpy(dst, f.plane(c), plane * sizeof(float));
      }
    }
  }
  return t;
}

std::vector<std::vector<data::Frame>> video_unbatch(const Tensor& t) {
  if (t.shape.rank != 5) throw std::invalid_argument("video_unbatch: expected (N,C,T,H,W)");
  const int n = t.shape[0], c = t.shape[1], tlen = t.shape[2], h = t.shape[3], w = t.shape[4];
  const size_t plane = static_cast<size_t>(h) * w;
  std::vector<std::vector<data::Frame>> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& seq = out[static_cast<size_t>(i)];
    seq.resize(static_cast<size_t>(tlen));
    for (int ti = 0; ti < tlen; ++ti) {
      data::Frame& f = seq[static_cast<size_t>(ti)];
      f.channels = c;
      f.height = h;
      f.width = w;
      f.pixels.resize(static_cast<size_t>(c) * plane);
      for (int ci = 0; ci < c; ++ci) {
        const float* src =
            t.data() + (((static_cast<size_t>(i) * c + ci) * tlen + ti) * plane);
        std::memcpy(f.plane(ci), src, plane * sizeof(float));
      }
    }
  }
  return out;
}

Tensor concat_time(const Tensor& a, const Tensor& b) {
  if (a.shape.rank != 5 || b.shape.rank != 5)
    throw std::invalid_argument("concat_time: expected video tensors");
  if (a.shape[0] != b.shape[0] || a.shape[1] != b.shape[1] || a.shape[3] != b.shape[3] ||
      a.shape[4] != b.shape[4])
    throw std::invalid_argument("concat_time: shape mismatch");
  const int n = a.shape[0], c = a.shape[1], ta = a.shape[2], tb = b.shape[2];
  const size_t plane = static_cast<size_t>(a.shape[3]) * a.shape[4];
  Tensor out(Shape{n, c, ta + tb, a.shape[3], a.shape[4]});
  for (int i = 0; i < n; ++i)
    for (int ci = 0; ci < c; ++ci) {
      const size_t nc = static_cast<size_t>(i) * c + ci;
      std::memcpy(out.data() + nc * (ta + tb) * plane, a.data() + nc * ta * plane,
                  static_cast<size_t>(ta) * plane * sizeof(float));
      std::memcpy(out.data() + (nc * (ta + tb) + ta) * plane, b.data() + nc * tb * plane,
                  static_cast<size_t>(tb) * plane * sizeof(float));
    }
  return out;
}

Tensor slice_time(const Tensor& x, int t0, int t1) {
  if (x.shape.rank != 5) throw std::invalid_argument("slice_time: expected video tensor");
  if (t0 < 0 || t1 > x.shape[2] || t0 >= t1) throw std::invalid_argument("slice_time: bad range");
  const int n = x.shape[0], c = x.shape[1], tlen = x.shape[2];
  const size_t plane = static_cast<size_t>(x.shape[3]) * x.shape[4];
  Tensor out(Shape{n, c, t1 - t0, x.shape[3], x.shape[4]});
  for (int i = 0; i < n; ++i)
    for (int ci = 0; ci < c; ++ci) {
      const size_t nc = static_cast<size_t>(i) * c + ci;
      std::memcpy(out.data() + nc * (t1 - t0) * plane, x.data() + (nc * tlen + t0) * plane,
                  static_cast<size_t>(t1 - t0) * plane * sizeof(float));
    }
  return out;
}

Tensor video_flatten_frames(const Tensor& x) {
  if (x.shape.rank != 5) throw std::invalid_argument("video_flatten_frames: expected (N,C,T,H,W)");
  const int n = x.shape[0], c = x.shape[1], tlen = x.shape[2], h = x.shape[3], w = x.shape[4];
  const size_t plane = static_cast<size_t>(h) * w;
  Tensor out(Shape{n * tlen, c, h, w});
  for (int i = 0; i < n; ++i)
    for (int ti = 0; ti < tlen; ++ti)
      for (int ci = 0; ci < c; ++ci) {
        const float* src = x.data() + ((static_cast<size_t>(i) * c + ci) * tlen + ti) * plane;
        float* dst =
            out.data() + ((static_cast<size_t>(i) * tlen + ti) * c + ci) * plane;
        std::memcpy(dst, src, plane * sizeof(float));
      }
  return out;
}

Tensor video_unflatten_frames(const Tensor& x, int n, int t) {
  if (x.shape.rank != 4) throw std::invalid_argument("video_unflatten_frames: expected (N*T,C,H,W)");
  if (x.shape[0] != n * t) throw std::invalid_argument("video_unflatten_frames: batch mismatch");
  const int c = x.shape[1], h = x.shape[2], w = x.shape[3];
  const size_t plane = static_cast<size_t>(h) * w;
  Tensor out(Shape{n, c, t, h, w});
  for (int i = 0; i < n; ++i)
    for (int ti = 0; ti < t; ++ti)
      for (int ci = 0; ci < c; ++ci) {
        const float* src =
            x.data() + ((static_cast<size_t>(i) * t + ti) * c + ci) * plane;
        float* dst = out.data() + ((static_cast<size_t>(i) * c + ci) * t + ti) * plane;
        std::memcpy(dst, src, plane * sizeof(float));
      }
  return out;
}

}  // namespace framecast::nn
