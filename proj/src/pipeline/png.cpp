#include "pipeline/png.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include <zlib.h>

#include "core/binio.hpp"
#include "core/errors.hpp"

namespace framecast::pipe {

namespace {

struct Glyph {
  char ch;
  const char* rows[7];
};

// clang-format off
constexpr Glyph kFont[] = {
  {' ', {"     ", "     ", "     ", "     ", "     ", "     ", "     "}},
  {'A', {" ### ", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
  {'B', {"#### ", "#   #", "#   #", "#### ", "#   #", "#   #", "#### "}},
  {'C', {" ####", "#    ", "#    ", "#    ", "#    ", "#    ", " ####"}},
  {'D', {"#### ", "#   #", "#   #", "#   #", "#   #", "#   #", "#### "}},
  {'E', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####"}},
  {'F', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    "}},
  {'G', {" ####", "#    ", "#    ", "#  ##", "#   #", "#   #", " ####"}},
  {'H', {"#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
  {'I', {" ### ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
  {'J', {"  ###", "   # ", "   # ", "   # ", "   # ", "#  # ", " ##  "}},
  {'K', {"#   #", "#  # ", "# #  ", "##   ", "# #  ", "#  # ", "#   #"}},
  {'L', {"#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####"}},
  {'M', {"#   #", "## ##", "# # #", "# # #", "#   #", "#   #", "#   #"}},
  {'N', {"#   #", "##  #", "# # #", "#  ##", "#   #", "#   #", "#   #"}},
  {'O', {" ### ", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
  {'P', {"#### ", "#   #", "#   #", "#### ", "#    ", "#    ", "#    "}},
  {'Q', {" ### ", "#   #", "#   #", "#   #", "# # #", "#  # ", " ## #"}},
  {'R', {"#### ", "#   #", "#   #", "#### ", "# #  ", "#  # ", "#   #"}},
  {'S', {" ####", "#    ", "#    ", " ### ", "    #", "    #", "#### "}},
  {'T', {"#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  "}},
  {'U', {"#   #", "#   #", "#   #", "#   #", "#   #", "#   #", " ### "}},
  {'V', {"#   #", "#   #", "#   #", "#   #", "#   #", " # # ", "  #  "}},
  {'W', {"#   #", "#   #", "#   #", "# # #", "# # #", "## ##", "#   #"}},
  {'X', {"#   #", "#   #", " # # ", "  #  ", " # # ", "#   #", "#   #"}},
  {'Y', {"#   #", "#   #", " # # ", "  #  ", "  #  ", "  #  ", "  #  "}},
  {'Z', {"#####", "    #", "   # ", "  #  ", " #   ", "#    ", "#####"}},
  {'0', {" ### ", "#   #", "#  ##", "# # #", "##  #", "#   #", " ### "}},
  {'1', {"  #  ", " ##  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### "}},
  {'2', {" ### ", "#   #", "    #", "   # ", "  #  ", " #   ", "#####"}},
  {'3', {" ### ", "#   #", "    #", "  ## ", "    #", "#   #", " ### "}},
  {'4', {"   # ", "  ## ", " # # ", "#  # ", "#####", "   # ", "   # "}},
  {'5', {"#####", "#    ", "#### ", "    #", "    #", "#   #", " ### "}},
  {'6', {" ### ", "#    ", "#    ", "#### ", "#   #", "#   #", " ### "}},
  {'7', {"#####", "    #", "   # ", "  #  ", "  #  ", "  #  ", "  #  "}},
  {'8', {" ### ", "#   #", "#   #", " ### ", "#   #", "#   #", " ### "}},
  {'9', {" ### ", "#   #", "#   #", " ####", "    #", "    #", " ### "}},
  {'.', {"     ", "     ", "     ", "     ", "     ", " ##  ", " ##  "}},
  {',', {"     ", "     ", "     ", "     ", " ##  ", "  #  ", " #   "}},
  {'-', {"     ", "     ", "     ", "#####", "     ", "     ", "     "}},
  {'_', {"     ", "     ", "     ", "     ", "     ", "     ", "#####"}},
  {':', {"     ", " ##  ", " ##  ", "     ", " ##  ", " ##  ", "     "}},
  {'/', {"    #", "    #", "   # ", "  #  ", " #   ", "#    ", "#    "}},
  {'(', {"   # ", "  #  ", " #   ", " #   ", " #   ", "  #  ", "   # "}},
  {')', {" #   ", "  #  ", "   # ", "   # ", "   # ", "  #  ", " #   "}},
  {'+', {"     ", "  #  ", "  #  ", "#####", "  #  ", "  #  ", "     "}},
  {'=', {"     ", "     ", "#####", "     ", "#####", "     ", "     "}},
  {'%', {"##   ", "##  #", "   # ", "  #  ", " #   ", "#  ##", "   ##"}},
  {'>', {"#    ", " #   ", "  #  ", "   # ", "  #  ", " #   ", "#    "}},
  {'<', {"    #", "   # ", "  #  ", " #   ", "  #  ", "   # ", "    #"}},
};
// clang-format on

const Glyph* find_glyph(char c) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const Glyph& g : kFont)
    if (g.ch == up) return &g;
  return nullptr;
}

constexpr int kGlyphW = 5;
constexpr int kGlyphAdvance = kGlyphW + 1;

// PNG integers are big-endian, unlike the container formats in core/binio.
void put_be32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void push_chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& data) {
  put_be32(out, static_cast<uint32_t>(data.size()));
  std::vector<uint8_t> body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  const uint32_t crc =
      static_cast<uint32_t>(crc32(0L, body.data(), static_cast<uInt>(body.size())));
  out.insert(out.end(), body.begin(), body.end());
  put_be32(out, crc);
}

}  // namespace

Canvas::Canvas(int width, int height, uint32_t background) : w_(width), h_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("Canvas: empty raster");
  px_.resize(static_cast<size_t>(width) * height * 3);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) set(x, y, background);
}

void Canvas::set(int x, int y, uint32_t rgb) {
  if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
  uint8_t* p = px_.data() + (static_cast<size_t>(y) * w_ + x) * 3;
  p[0] = static_cast<uint8_t>(rgb >> 16);
  p[1] = static_cast<uint8_t>(rgb >> 8);
  p[2] = static_cast<uint8_t>(rgb);
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, uint32_t rgb) {
  if (x1 < x0) std::swap(x0, x1);
  if (y1 < y0) std::swap(y0, y1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) set(x, y, rgb);
}

void Canvas::line(int x0, int y0, int x1, int y1, uint32_t rgb) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    set(x0, y0, rgb);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void Canvas::marker(int x, int y, uint32_t rgb) { fill_rect(x - 1, y - 1, x + 1, y + 1, rgb); }

void Canvas::text(int x, int y, const std::string& s, uint32_t rgb) {
  int cx = x;
  for (char c : s) {
    const Glyph* g = find_glyph(c);
    if (g) {
      for (int ry = 0; ry < kGlyphH; ++ry)
        for (int rx = 0; rx < kGlyphW; ++rx)
          if (g->rows[ry][rx] == '#') set(cx + rx, y + ry, rgb);
    } else {
      for (int ry = 0; ry < kGlyphH; ++ry)
        for (int rx = 0; rx < kGlyphW; ++rx)
          if (ry == 0 || ry == kGlyphH - 1 || rx == 0 || rx == kGlyphW - 1)
            set(cx + rx, y + ry, rgb);
    }
    cx += kGlyphAdvance;
  }
}

int Canvas::text_width(const std::string& s) {
  return s.empty() ? 0 : static_cast<int>(s.size()) * kGlyphAdvance - 1;
}

void Canvas::save_png(const std::filesystem::path& path) const {
  // filter byte 0 in front of every scanline
  std::vector<uint8_t> raw(static_cast<size_t>(h_) * (static_cast<size_t>(w_) * 3 + 1));
  for (int y = 0; y < h_; ++y) {
    uint8_t* row = raw.data() + static_cast<size_t>(y) * (static_cast<size_t>(w_) * 3 + 1);
    row[0] = 0;
    std::memcpy(row + 1, px_.data() + static_cast<size_t>(y) * w_ * 3,
                static_cast<size_t>(w_) * 3);
  }
  uLongf clen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> compressed(clen);
  if (compress2(compressed.data(), &clen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw IoError("PNG deflate failed");
  compressed.resize(clen);

  std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<uint8_t> ihdr;
  put_be32(ihdr, static_cast<uint32_t>(w_));
  put_be32(ihdr, static_cast<uint32_t>(h_));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  push_chunk(out, "IHDR", ihdr);
  push_chunk(out, "IDAT", compressed);
  push_chunk(out, "IEND", {});
  write_file_bytes(path.string(),
                   std::string(reinterpret_cast<const char*>(out.data()), out.size()));
}

}  // namespace framecast::pipe
