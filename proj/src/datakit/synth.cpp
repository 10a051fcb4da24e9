#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"
#include "datakit/ops.hpp"

namespace framecast::data {

namespace {

// Exact coverage of the unit pixel cell [px,px+1) x [py,py+1) by an
// axis-aligned square of half-extent h centred at (cx, cy).
double square_coverage(double px, double py, double cx, double cy, double h) {
  const double ox = std::min(px + 1.0, cx + h) - std::max(px, cx - h);
  const double oy = std::min(py + 1.0, cy + h) - std::max(py, cy - h);
  if (ox <= 0.0 || oy <= 0.0) return 0.0;
  return std::min(ox, 1.0) * std::min(oy, 1.0);
}

// 4x4 supersampled coverage for circles.
double circle_coverage(double px, double py, double cx, double cy, double r) {
  const double r2 = r * r;
  int hit = 0;
  for (int sy = 0; sy < 4; ++sy)
    for (int sx = 0; sx < 4; ++sx) {
      const double x = px + (sx + 0.5) / 4.0;
      const double y = py + (sy + 0.5) / 4.0;
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r2) ++hit;
    }
  return hit / 16.0;
}

struct MovingShape {
  ShapeSpec spec;
  double x, y, vx, vy;
};

void advance(MovingShape& s, EdgeRule rule, double canvas) {
  s.x += s.vx;
  s.y += s.vy;
  const double h = s.spec.size / 2.0;
  if (rule == EdgeRule::wrap) {
    s.x = std::fmod(s.x, canvas);
    if (s.x < 0.0) s.x += canvas;
    s.y = std::fmod(s.y, canvas);
    if (s.y < 0.0) s.y += canvas;
    return;
  }
  // Bounce: reflect off each wall. Velocities are small relative to the
  // canvas, so a few iterations settle any overshoot.
  for (int iter = 0; iter < 8; ++iter) {
    bool moved = false;
    if (s.x - h < 0.0) {
      s.x = 2.0 * h - s.x;
      s.vx = -s.vx;
      moved = true;
    }
    if (s.x + h > canvas) {
      s.x = 2.0 * (canvas - h) - s.x;
      s.vx = -s.vx;
      moved = true;
    }
    if (s.y - h < 0.0) {
      s.y = 2.0 * h - s.y;
      s.vy = -s.vy;
      moved = true;
    }
    if (s.y + h > canvas) {
      s.y = 2.0 * (canvas - h) - s.y;
      s.vy = -s.vy;
      moved = true;
    }
    if (!moved) break;
  }
}

void render(Frame& f, const MovingShape& s, EdgeRule rule, int canvas) {
  const double half = s.spec.size / 2.0;
  // Under wrap a shape can straddle an edge; drawing the eight torus
  // translates as well covers that.
  const int reps = rule == EdgeRule::wrap ? 1 : 0;
  for (int ry = -reps; ry <= reps; ++ry) {
    for (int rx = -reps; rx <= reps; ++rx) {
      const double cx = s.x + rx * canvas;
      const double cy = s.y + ry * canvas;
      const int x0 = std::max(0, static_cast<int>(std::floor(cx - half)) - 1);
      const int x1 = std::min(canvas - 1, static_cast<int>(std::ceil(cx + half)) + 1);
      const int y0 = std::max(0, static_cast<int>(std::floor(cy - half)) - 1);
      const int y1 = std::min(canvas - 1, static_cast<int>(std::ceil(cy + half)) + 1);
      for (int py = y0; py <= y1; ++py) {
        for (int px = x0; px <= x1; ++px) {
          const double a = s.spec.kind == ShapeKind::square
                               ? square_coverage(px, py, cx, cy, half)
                               : circle_coverage(px, py, cx, cy, half);
          if (a <= 0.0) continue;
          const float af = static_cast<float>(a);
          for (int c = 0; c < f.channels; ++c) {
            float& v = f.at(c, py, px);
            const float col = f.channels == 3 ? s.spec.color[static_cast<size_t>(c)]
                                              : s.spec.color[0];
            v = v * (1.0f - af) + col * af;
          }
        }
      }
    }
  }
}

std::vector<MovingShape> build_shapes(const ShapesConfig& cfg) {
  std::vector<ShapeSpec> specs = cfg.shapes;
  if (specs.empty()) {
    if (cfg.shape_count <= 0) throw std::invalid_argument("synth: shape_count must be positive");
    if (!(cfg.min_size > 0.0) || cfg.max_size < cfg.min_size)
      throw std::invalid_argument("synth: bad size range");
    if (cfg.min_speed < 0.0 || cfg.max_speed < cfg.min_speed)
      throw std::invalid_argument("synth: bad speed range");
    Rng rng = Rng::derived(cfg.seed, "shapes");
    for (int i = 0; i < cfg.shape_count; ++i) {
      ShapeSpec s;
      s.kind = rng.coin(0.7) ? ShapeKind::square : ShapeKind::circle;
      s.size = rng.uniform(cfg.min_size, cfg.max_size);
      const double h = s.size / 2.0;
      s.x = rng.uniform(h, cfg.canvas - h);
      s.y = rng.uniform(h, cfg.canvas - h);
      s.vx = rng.uniform(cfg.min_speed, cfg.max_speed) * (rng.coin(0.5) ? 1.0 : -1.0);
      s.vy = rng.uniform(cfg.min_speed, cfg.max_speed) * (rng.coin(0.5) ? 1.0 : -1.0);
      for (int c = 0; c < 3; ++c) s.color[static_cast<size_t>(c)] = static_cast<float>(rng.uniform(0.55, 1.0));
      specs.push_back(s);
    }
  }
  std::vector<MovingShape> out;
  for (const ShapeSpec& s : specs) {
    if (!(s.size > 0.0)) throw std::invalid_argument("synth: shape size must be positive");
    if (s.size > cfg.canvas)
      throw std::invalid_argument("synth: shape larger than canvas");
    out.push_back({s, s.x, s.y, s.vx, s.vy});
  }
  return out;
}

}  // namespace

VideoClip synth_moving_shapes(const ShapesConfig& cfg) {
  if (cfg.canvas < 4) throw std::invalid_argument("synth: canvas must be at least 4");
  if (cfg.channels != 1 && cfg.channels != 3)
    throw std::invalid_argument("synth: channels must be 1 or 3");
  if (cfg.frame_count < 1) throw std::invalid_argument("synth: frame_count must be positive");
  if (cfg.blur_sigma < 0.0) throw std::invalid_argument("synth: blur_sigma must be >= 0");

  std::vector<MovingShape> shapes = build_shapes(cfg);

  VideoClip clip;
  clip.id = cfg.clip_id;
  clip.fps = cfg.fps;
  clip.frames.reserve(static_cast<size_t>(cfg.frame_count));
  for (int fi = 0; fi < cfg.frame_count; ++fi) {
    Frame f = Frame::zeros(cfg.canvas, cfg.canvas, cfg.channels);
    for (const MovingShape& s : shapes) render(f, s, cfg.edge_rule, cfg.canvas);
    if (cfg.blur_sigma > 0.0) f = gaussian_blur(f, cfg.blur_sigma);
    clip.frames.push_back(std::move(f));
    for (MovingShape& s : shapes) advance(s, cfg.edge_rule, cfg.canvas);
  }
  return clip;
}

}  // namespace framecast::data
