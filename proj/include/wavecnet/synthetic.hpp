// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

// Procedural data for tests, demos and the desk-scale training runs.

#pragma once

#include <cstddef>
#include <cstdint>

#include "wavecnet/dataset.hpp"
#include "wavecnet/tensor.hpp"

namespace wavecnet {

/// Smooth image in [0, 1]: a tilted ramp plus two low-frequency waves whose
/// phases come from the seed.
Matrix<double> smooth_test_image(std::size_t height, std::size_t width, std::uint64_t seed = 0);

struct GlyphOptions {
  std::size_t size = 28;          // square images
  double box = 20.0;              // glyph box edge in pixels before jitter
  double max_rotation = 0.2;      // radians
  double max_shear = 0.15;
  double max_shift = 2.0;         // pixels
  double min_scale = 0.8;
  double max_scale = 1.05;
  double min_stroke = 1.4;        // pixels
  double max_stroke = 2.4;
};

/// Ten hand-drawn digit skeletons rendered as anti-aliased white strokes on
/// black with random affine jitter. Sample i has label i % 10 and its own
/// random stream derived from (seed, i).
Dataset make_glyph_dataset(std::size_t count, std::uint64_t seed, const GlyphOptions& options = {});

}  // namespace wavecnet
