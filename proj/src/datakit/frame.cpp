#include "datakit/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace framecast::data {

Frame Frame::zeros(int h, int w, int c) {
  Frame f;
  f.height = h;
  f.width = w;
  f.channels = c;
  f.pixels.assign(static_cast<size_t>(c) * h * w, 0.0f);
  f.validate();
  return f;
}

void Frame::validate() const {
  if (height < 4 || width < 4)
    throw std::invalid_argument("Frame: spatial dims must be at least 4");
  if (channels != 1 && channels != 3)
    throw std::invalid_argument("Frame: channels must be 1 or 3");
  if (pixels.size() != static_cast<size_t>(channels) * height * width)
    throw std::invalid_argument("Frame: pixel buffer size mismatch");
  for (float v : pixels)
    if (!(v >= 0.0f && v <= 1.0f))
      throw std::invalid_argument("Frame: pixel values must lie in [0,1]");
}

std::vector<double> luma(const Frame& f) {
  std::vector<double> out(static_cast<size_t>(f.height) * f.width);
  if (f.channels == 1) {
    for (size_t i = 0; i < out.size(); ++i) out[i] = f.pixels[i];
    return out;
  }
  const float* r = f.plane(0);
  const float* g = f.plane(1);
  const float* b = f.plane(2);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

void VideoClip::validate() const {
  if (frames.empty()) throw std::invalid_argument("VideoClip: no frames");
  if (!(fps > 0.0)) throw std::invalid_argument("VideoClip: fps must be positive");
  for (const Frame& f : frames) {
    f.validate();
    if (!f.same_dims(frames.front()))
      throw std::invalid_argument("VideoClip: frames must share dimensions");
  }
}

}  // namespace framecast::data
