#include "selfrec/masks.hpp"

#include <cmath>

#include "selfrec/localize.hpp"

namespace selfrec {

namespace {

struct Painter {
  int64_t h, w;
  std::vector<float> px;  // row major

  Painter(int64_t h_, int64_t w_) : h(h_), w(w_), px(size_t(h_ * w_), 0.f) {}

  void fill_box(int64_t x0, int64_t y0, int64_t bw, int64_t bh) {
    for (int64_t y = y0; y < y0 + bh; ++y) {
      for (int64_t x = x0; x < x0 + bw; ++x) {
        px[size_t(y * w + x)] = 1.f;
      }
    }
  }

  // thick segment: every pixel within radius of the line between a and b
  void fill_capsule(double ax, double ay, double bx, double by, double radius) {
    const double r2 = radius * radius;
    const int64_t x0 = std::max<int64_t>(0, int64_t(std::floor(std::min(ax, bx) - radius)));
    const int64_t x1 = std::min<int64_t>(w - 1, int64_t(std::ceil(std::max(ax, bx) + radius)));
    const int64_t y0 = std::max<int64_t>(0, int64_t(std::floor(std::min(ay, by) - radius)));
    const int64_t y1 = std::min<int64_t>(h - 1, int64_t(std::ceil(std::max(ay, by) + radius)));
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    for (int64_t y = y0; y <= y1; ++y) {
      for (int64_t x = x0; x <= x1; ++x) {
        double t = len2 > 0 ? ((x - ax) * dx + (y - ay) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double cx = ax + t * dx, cy = ay + t * dy;
        const double qx = x - cx, qy = y - cy;
        if (qx * qx + qy * qy <= r2) {
          px[size_t(y * w + x)] = 1.f;
        }
      }
    }
  }

  double coverage() const {
    double s = 0;
    for (float v : px) s += v;
    return s / double(px.size());
  }
};

Painter draw_boxes(const MaskSpec& spec, int64_t h, int64_t w, SplitMix64& rng,
                   int& boxes_out) {
  Painter p(h, w);
  const int boxes = int(rng.next_int(spec.min_boxes, spec.max_boxes));
  boxes_out = boxes;
  for (int i = 0; i < boxes; ++i) {
    const int64_t bw = rng.next_int(spec.min_edge, spec.max_edge);
    const int64_t bh = rng.next_int(spec.min_edge, spec.max_edge);
    const int64_t x0 = rng.next_int(spec.box_margin, w - spec.box_margin - bw);
    const int64_t y0 = rng.next_int(spec.box_margin, h - spec.box_margin - bh);
    p.fill_box(x0, y0, bw, bh);
  }
  return p;
}

Painter draw_strokes(const MaskSpec& spec, int64_t h, int64_t w,
                     SplitMix64& rng, int& strokes_out) {
  Painter p(h, w);
  const int strokes = int(rng.next_int(spec.min_strokes, spec.max_strokes));
  strokes_out = strokes;
  const double min_len = double(std::min(h, w)) / 8.0;
  const double max_len = double(std::min(h, w)) / 2.0;
  for (int s = 0; s < strokes; ++s) {
    const double width = rng.next_in(spec.min_width, spec.max_width);
    const int segments = 1 + int(rng.next_int(0, spec.max_turns));
    double x = rng.next_in(0, double(w - 1));
    double y = rng.next_in(0, double(h - 1));
    for (int k = 0; k < segments; ++k) {
      const double angle = rng.next_in(0, 2.0 * M_PI);
      const double len = rng.next_in(min_len, max_len);
      double nx = std::clamp(x + len * std::cos(angle), 0.0, double(w - 1));
      double ny = std::clamp(y + len * std::sin(angle), 0.0, double(h - 1));
      p.fill_capsule(x, y, nx, ny, width / 2.0);
      x = nx;
      y = ny;
    }
  }
  return p;
}

}  // namespace

torch::Tensor generate_mask(const MaskSpec& spec, int64_t h, int64_t w,
                            SplitMix64& rng, MaskStats* stats) {
  if (spec.strategy == MaskStrategy::kBox) {
    const int64_t need = spec.max_edge + 2 * spec.box_margin;
    if (h < need || w < need) {
      throw ConfigError("box masks need image dims >= " + std::to_string(need));
    }
  }
  const int kMaxTries = 100;
  Painter best(h, w);
  MaskStats best_stats;
  double best_dist = 1e30;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    MaskStats cur;
    Painter p = spec.strategy == MaskStrategy::kBox
                    ? draw_boxes(spec, h, w, rng, cur.boxes)
                    : draw_strokes(spec, h, w, rng, cur.strokes);
    cur.coverage = p.coverage();
    cur.resamples = attempt;
    const bool inside = cur.coverage >= spec.min_coverage &&
                        cur.coverage <= spec.max_coverage;
    const double dist =
        inside ? 0.0
               : std::min(std::abs(cur.coverage - spec.min_coverage),
                          std::abs(cur.coverage - spec.max_coverage));
    if (dist < best_dist) {
      best_dist = dist;
      best = std::move(p);
      best_stats = cur;
    }
    if (inside) break;
  }
  if (stats) *stats = best_stats;
  return torch::from_blob(best.px.data(), {h, w}, torch::kFloat).clone();
}

torch::Tensor splice(const torch::Tensor& img, const torch::Tensor& donor,
                     const torch::Tensor& mask) {
  return composite(donor, img, mask);
}

}  // namespace selfrec
