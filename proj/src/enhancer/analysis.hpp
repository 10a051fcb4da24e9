#pragma once

#include "datakit/frame.hpp"

namespace framecast::enh {

// Fraction of a frame's AC luma energy sitting exactly at the artifact
// frequencies of a stride-`period` upsampler: the spectral bins with
// vertical frequency in {0, H/period} and horizontal in {0, W/period},
// conjugates included, DC excluded. 1.0 means the frame's variation is
// entirely that periodic pattern; a constant frame scores 0. The sums run
// in double precision and ignore the mean, so the score is invariant to
// brightness shifts. H and W must be divisible by the period.
double checkerboard_score(const data::Frame& f, int period);

}  // namespace framecast::enh
