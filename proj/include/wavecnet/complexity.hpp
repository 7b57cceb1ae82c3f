// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavecnet/nn/config.hpp"
#include "wavecnet/tensor.hpp"

namespace wavecnet {

/// Multiply-adds of a dense one-level 2D DWT of c planes of m x n pixels,
/// 4c(m^2 n + m n^2 / 2 - 3mn / 4). Throws NonPositive unless m, n, c >= 1.
std::uint64_t dwt2d_madds(std::int64_t m, std::int64_t n, std::int64_t c);

/// Dense 2D IDWT count, 4c(m n^2 + m^2 n / 2 - 3mn / 4) + 3.
std::uint64_t idwt2d_madds(std::int64_t m, std::int64_t n, std::int64_t c);

/// Multiply-adds of the banded kernels for one m x n plane. With ll_only
/// only the low-pass rows and columns are evaluated.
std::uint64_t banded_dwt2d_madds(const std::string& wavelet, std::size_t m, std::size_t n, bool ll_only);

struct LayerMadds {
  std::size_t index = 0;
  std::string layer;
  Shape input;   // per sample
  Shape output;  // per sample
  std::uint64_t madds = 0;
  bool wavelet = false;
  std::uint64_t banded = 0;  // wavelet layers only; not the dense convention
};

struct MaddsReport {
  std::size_t batch = 1;
  std::vector<LayerMadds> layers;
  std::uint64_t wavelet = 0;
  std::uint64_t non_wavelet = 0;
  std::uint64_t total = 0;
  double ratio = 0.0;  // 100 * wavelet / total
  /// Alternative reading that charges DwtLL layers a quarter of the dense
  /// count (ll subband only). Other wavelet layers keep the full count.
  std::uint64_t wavelet_ll_quarter = 0;
  double ratio_ll_quarter = 0.0;
  std::uint64_t wavelet_banded = 0;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Convolutions count output elements x input channels x k x k, dense
/// layers in x out, wavelet down-sampling dwt2d_madds of its input; batch
/// norm, ReLU and pooling count zero. `input` is [C,H,W] or [N,C,H,W] and
/// replaces the config's input shape. Throws InvalidConfig.
MaddsReport model_madds(const nn::ModelConfig& cfg, const Shape& input);

}  // namespace wavecnet
