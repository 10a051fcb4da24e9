#pragma once

#include <filesystem>
#include <string>

#include "datakit/frame.hpp"

namespace framecast::data {

// Directory format: frame_000001.ppm, frame_000002.ppm, ... plus meta.json.
// Frames are 16-bit binary PPM (P6) for RGB or PGM (P5) for gray, big-endian
// samples, maxval 65535. Quantization to 16 bits is the only lossy step.
void save_clip_dir(const VideoClip& clip, const std::filesystem::path& dir);
VideoClip load_clip_dir(const std::filesystem::path& dir);

// Packed container: magic "FCPK1\n", JSON header, then raw float32
// little-endian planes frame by frame. Round-trips exactly.
void save_clip_pack(const VideoClip& clip, const std::filesystem::path& file);
VideoClip load_clip_pack(const std::filesystem::path& file);

}  // namespace framecast::data
