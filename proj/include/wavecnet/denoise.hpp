// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <span>
#include <string>

#include "wavecnet/tensor.hpp"

namespace wavecnet {

struct DenoiseConfig {
  std::string wavelet = "haar";
  double lambda = 0.1;  // pixel scale [0, 1]
};

/// x - λ above λ, x + λ below -λ, zero in between. Throws NegativeLambda.
template <class T>
T soft_shrink(T x, T lambda);

template <class T>
void soft_shrink_in_place(std::span<T> values, T lambda);

/// One-level transform, soft shrinkage of lh/hl/hh only, reconstruction.
template <class T>
Matrix<T> denoise_image(const Matrix<T>& image, const DenoiseConfig& cfg);

/// Accepts [H,W], [C,H,W] or [N,C,H,W]; every plane is denoised on its own.
template <class T>
Tensor<T> denoise_image(const Tensor<T>& image, const DenoiseConfig& cfg);

}  // namespace wavecnet
