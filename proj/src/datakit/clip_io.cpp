#include "datakit/clip_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include <json.hpp>

#include "core/binio.hpp"
#include "core/errors.hpp"

namespace framecast::data {

namespace {

std::string frame_name(int index1) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.%s", index1, "ppm");
  return buf;
}

std::string encode_pnm(const Frame& f) {
  std::string out;
  out += f.channels == 3 ? "P6\n" : "P5\n";
  out += std::to_string(f.width) + " " + std::to_string(f.height) + "\n65535\n";
  out.reserve(out.size() + static_cast<size_t>(f.channels) * f.height * f.width * 2);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      for (int c = 0; c < f.channels; ++c) {
        const float v = f.at(c, y, x);
        const auto q = static_cast<uint16_t>(std::lround(v * 65535.0f));
        out.push_back(static_cast<char>(q >> 8));
        out.push_back(static_cast<char>(q & 0xff));
      }
  return out;
}

Frame decode_pnm(const std::string& bytes, const std::string& what) {
  size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    }
    const size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };

  const std::string magic = token();
  int channels;
  if (magic == "P6")
    channels = 3;
  else if (magic == "P5")
    channels = 1;
  else
    throw IoError("unsupported image format in " + what);
  const int w = std::stoi(token());
  const int h = std::stoi(token());
  const int maxval = std::stoi(token());
  if (maxval != 65535) throw IoError("expected 16-bit samples in " + what);
  ++pos;  // single whitespace after maxval

  const size_t need = static_cast<size_t>(channels) * h * w * 2;
  if (bytes.size() - pos < need) throw IoError("truncated image data in " + what);

  Frame f;
  f.height = h;
  f.width = w;
  f.channels = channels;
  f.pixels.resize(static_cast<size_t>(channels) * h * w);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        const uint16_t q = static_cast<uint16_t>((p[0] << 8) | p[1]);
        p += 2;
        f.at(c, y, x) = static_cast<float>(q) / 65535.0f;
      }
  return f;
}

}  // namespace

void save_clip_dir(const VideoClip& clip, const std::filesystem::path& dir) {
  clip.validate();
  std::filesystem::create_directories(dir);
  const Frame& f0 = clip.frames.front();
  nlohmann::json meta = {
      {"fps", clip.fps},         {"frame_count", clip.frames.size()},
      {"height", f0.height},     {"width", f0.width},
      {"channels", f0.channels}, {"bit_depth", 16},
      {"clip_id", clip.id},
  };
  write_file_bytes((dir / "meta.json").string(), meta.dump(2) + "\n");
  for (size_t i = 0; i < clip.frames.size(); ++i)
    write_file_bytes((dir / frame_name(static_cast<int>(i) + 1)).string(),
                     encode_pnm(clip.frames[i]));
}

VideoClip load_clip_dir(const std::filesystem::path& dir) {
  const std::filesystem::path meta_path = dir / "meta.json";
  if (!std::filesystem::exists(meta_path))
    throw MissingDataError("missing clip metadata: " + meta_path.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file_bytes(meta_path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad clip metadata in " + meta_path.string() + ": " + e.what());
  }
  VideoClip clip;
  clip.fps = meta.value("fps", 17.0);
  clip.id = meta.value("clip_id", 0);
  const int count = meta.at("frame_count").get<int>();
  for (int i = 1; i <= count; ++i) {
    const std::filesystem::path fp = dir / frame_name(i);
    if (!std::filesystem::exists(fp))
      throw MissingDataError("missing frame file: " + fp.string());
    clip.frames.push_back(decode_pnm(read_file_bytes(fp.string()), fp.string()));
  }
  clip.validate();
  return clip;
}

void save_clip_pack(const VideoClip& clip, const std::filesystem::path& file) {
  clip.validate();
  const Frame& f0 = clip.frames.front();
  nlohmann::json header = {
      {"fps", clip.fps},         {"frame_count", clip.frames.size()},
      {"height", f0.height},     {"width", f0.width},
      {"channels", f0.channels}, {"clip_id", clip.id},
  };
  std::string bytes = "FCPK1\n";
  const std::string hs = header.dump();
  put_u32(bytes, static_cast<uint32_t>(hs.size()));
  bytes += hs;
  for (const Frame& f : clip.frames)
    bytes.append(reinterpret_cast<const char*>(f.pixels.data()), f.pixels.size() * sizeof(float));
  write_file_bytes(file.string(), bytes);
}

VideoClip load_clip_pack(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file))
    throw MissingDataError("missing clip file: " + file.string());
  const std::string bytes = read_file_bytes(file.string());
  ByteReader r(bytes.data(), bytes.size());
  if (r.bytes(6) != "FCPK1\n") throw IoError("not a packed clip: " + file.string());
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.bytes(r.u32()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad packed clip header: " + std::string(e.what()));
  }
  VideoClip clip;
  clip.fps = header.at("fps").get<double>();
  clip.id = header.value("clip_id", 0);
  const int count = header.at("frame_count").get<int>();
  const int h = header.at("height").get<int>();
  const int w = header.at("width").get<int>();
  const int c = header.at("channels").get<int>();
  for (int i = 0; i < count; ++i) {
    Frame f;
    f.height = h;
    f.width = w;
    f.channels = c;
    f.pixels.resize(static_cast<size_t>(c) * h * w);
    r.floats(f.pixels.data(), f.pixels.size());
    clip.frames.push_back(std::move(f));
  }
  clip.validate();
  return clip;
}

}  // namespace framecast::data
