#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace framecast::pipe {

// Tiny RGB raster with just enough drawing for metric charts: filled
// rectangles, one-pixel lines, small markers and a 5x7 uppercase bitmap
// font. Saved as 8-bit RGB PNG (zlib-deflated, filter 0), so identical
// draw calls produce identical bytes.
class Canvas {
 public:
  Canvas(int width, int height, uint32_t background = 0xffffff);

  int width() const { return w_; }
  int height() const { return h_; }

  void set(int x, int y, uint32_t rgb);
  void fill_rect(int x0, int y0, int x1, int y1, uint32_t rgb);  // inclusive corners
  void line(int x0, int y0, int x1, int y1, uint32_t rgb);
  void marker(int x, int y, uint32_t rgb);  // 3x3 square

  // Draws text with its top-left corner at (x, y). Lowercase is rendered
  // uppercase; characters without a glyph become a hollow box.
  void text(int x, int y, const std::string& s, uint32_t rgb);
  static int text_width(const std::string& s);
  static constexpr int kGlyphH = 7;

  void save_png(const std::filesystem::path& path) const;

 private:
  int w_, h_;
  std::vector<uint8_t> px_;
};

}  // namespace framecast::pipe
