// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "wavecnet/error.hpp"
#include "wavecnet/rng.hpp"

namespace wavecnet {
namespace {

struct Point {
  double x, y;
};
using Stroke = std::vector<Point>;
using Glyph = std::vector<Stroke>;

Stroke ellipse(double cx, double cy, double rx, double ry, int steps = 20) {
  Stroke s;
  for (int i = 0; i <= steps; ++i) {
    const double t = 2.0 * std::numbers::pi * i / steps;
    s.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
  }
  return s;
}

// Unit-box skeletons, x to the right and y downwards.
const std::vector<Glyph>& glyphs() {
  static const std::vector<Glyph> table = {
      {ellipse(0.5, 0.5, 0.32, 0.45)},
      {{{0.35, 0.2}, {0.52, 0.05}, {0.52, 0.95}}},
      {{{0.2, 0.25}, {0.3, 0.1}, {0.5, 0.05}, {0.7, 0.1}, {0.8, 0.25}, {0.75, 0.45}, {0.2, 0.95}, {0.85, 0.95}}},
      {{{0.2, 0.1}, {0.75, 0.1}, {0.45, 0.45}, {0.7, 0.55}, {0.8, 0.72}, {0.65, 0.92}, {0.2, 0.9}}},
      {{{0.65, 0.95}, {0.65, 0.05}, {0.15, 0.65}, {0.85, 0.65}}},
      {{{0.8, 0.05}, {0.25, 0.05}, {0.2, 0.45}, {0.55, 0.4}, {0.78, 0.55}, {0.78, 0.8}, {0.55, 0.95}, {0.2, 0.88}}},
      {{{0.7, 0.05}, {0.4, 0.25}, {0.25, 0.55}, {0.25, 0.8}, {0.45, 0.95}, {0.7, 0.9}, {0.78, 0.7}, {0.6, 0.52},
        {0.35, 0.55}, {0.25, 0.7}}},
      {{{0.15, 0.05}, {0.85, 0.05}, {0.4, 0.95}}},
      {ellipse(0.5, 0.27, 0.24, 0.21), ellipse(0.5, 0.72, 0.29, 0.23)},
      {ellipse(0.5, 0.3, 0.26, 0.24), {{0.76, 0.3}, {0.62, 0.95}}},
  };
  return table;
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = p.x - (a.x + t * dx), ey = p.y - (a.y + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

Matrix<double> smooth_test_image(std::size_t height, std::size_t width, std::uint64_t seed) {
  if (height == 0 || width == 0) throw Error(Errc::InvalidArgument, "image must be non-empty");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const double p1 = phase(rng), p2 = phase(rng);
  Matrix<double> img(height, width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double y = static_cast<double>(r) / static_cast<double>(height);
      const double x = static_cast<double>(c) / static_cast<double>(width);
      const double v = 0.5 + 0.15 * (x - y) + 0.2 * std::sin(2.0 * std::numbers::pi * 1.5 * x + p1) *
                                                  std::cos(2.0 * std::numbers::pi * y + p2) +
                       0.08 * std::sin(2.0 * std::numbers::pi * 2.0 * (x + y) + p2);
      img(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

Dataset make_glyph_dataset(std::size_t count, std::uint64_t seed, const GlyphOptions& o) {
  if (count == 0 || o.size == 0) throw Error(Errc::InvalidArgument, "glyph dataset needs a positive count and size");
  const std::size_t n = o.size;
  std::vector<float> pixels(count * n * n, 0.0f);
  std::vector<std::size_t> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = i % 10;
    labels[i] = label;
    std::mt19937_64 rng(derive_seed(seed, i));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double rot = o.max_rotation * u(rng);
    const double shear = o.max_shear * u(rng);
    const double scale = o.min_scale + (o.max_scale - o.min_scale) * 0.5 * (u(rng) + 1.0);
    const double sx = o.max_shift * u(rng), sy = o.max_shift * u(rng);
    const double stroke = o.min_stroke + (o.max_stroke - o.min_stroke) * 0.5 * (u(rng) + 1.0);
    const double cs = std::cos(rot), sn = std::sin(rot);
    const double centre = 0.5 * static_cast<double>(n);

    std::vector<Stroke> placed;
    for (const auto& s : glyphs()[label]) {
      Stroke t;
      for (const auto& p : s) {
        double x = (p.x - 0.5) * o.box * scale, y = (p.y - 0.5) * o.box * scale;
        x += shear * y;
        t.push_back({cs * x - sn * y + centre + sx, sn * x + cs * y + centre + sy});
      }
      placed.push_back(std::move(t));
    }

    float* img = pixels.data() + i * n * n;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const Point p{static_cast<double>(c) + 0.5, static_cast<double>(r) + 0.5};
        double d = 1e9;
        for (const auto& s : placed) {
          for (std::size_t k = 0; k + 1 < s.size(); ++k) d = std::min(d, segment_distance(p, s[k], s[k + 1]));
        }
        img[r * n + c] = static_cast<float>(std::clamp(0.5 * stroke + 0.5 - d, 0.0, 1.0));
      }
    }
  }
  return Dataset{Tensor<float>({count, 1, n, n}, std::move(pixels)), std::move(labels)};
}

}  // namespace wavecnet
