#pragma once

#include <vector>

#include "datakit/frame.hpp"
#include "nn/tensor.hpp"

namespace framecast::nn {

// Frame <-> tensor marshalling. Image batches are (N, C, H, W); frame
// sequences become (N, C, T, H, W) with time as the third axis.

Tensor image_batch(const std::vector<data::Frame>& frames);
std::vector<data::Frame> image_unbatch(const Tensor& t);

Tensor video_batch(const std::vector<std::vector<data::Frame>>& sequences);
std::vector<std::vector<data::Frame>> video_unbatch(const Tensor& t);

// Concatenates two video tensors along T. Shapes must agree elsewhere.
Tensor concat_time(const Tensor& a, const Tensor& b);

// Returns frames [t0, t1) of a video tensor.
Tensor slice_time(const Tensor& x, int t0, int t1);

// (N, C, T, H, W) <-> (N*T, C, H, W); frame order is (n, t) row-major.
// Pure data movement, used to feed video predictions through image losses.
Tensor video_flatten_frames(const Tensor& x);
Tensor video_unflatten_frames(const Tensor& x, int n, int t);

}  // namespace framecast::nn
