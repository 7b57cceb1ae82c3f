// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wavecnet/tensor.hpp"

namespace wavecnet::nn {

enum class DownsampleKind { MaxPool2, AvgPool2, StridedConv, DwtLL, DwtAvg, DwtCat };

/// How a network halves its spatial resolution. Wavelet modes carry the
/// registry name of the wavelet they use.
struct DownsampleMode {
  DownsampleKind kind = DownsampleKind::MaxPool2;
  std::string wavelet;

  static DownsampleMode max_pool() { return {DownsampleKind::MaxPool2, {}}; }
  static DownsampleMode avg_pool() { return {DownsampleKind::AvgPool2, {}}; }
  static DownsampleMode strided_conv() { return {DownsampleKind::StridedConv, {}}; }
  static DownsampleMode dwt_ll(std::string w) { return {DownsampleKind::DwtLL, std::move(w)}; }
  static DownsampleMode dwt_avg(std::string w) { return {DownsampleKind::DwtAvg, std::move(w)}; }
  static DownsampleMode dwt_cat(std::string w) { return {DownsampleKind::DwtCat, std::move(w)}; }

  bool is_wavelet() const {
    return kind == DownsampleKind::DwtLL || kind == DownsampleKind::DwtAvg || kind == DownsampleKind::DwtCat;
  }
  /// Channel multiplier of the layer output.
  std::size_t channel_factor() const { return kind == DownsampleKind::DwtCat ? 4 : 1; }

  /// "max_pool", "avg_pool", "strided_conv", "dwt_ll:haar", "dwt_avg:db2", ...
  std::string to_string() const;
  static DownsampleMode parse(std::string_view text);

  bool operator==(const DownsampleMode&) const = default;
};

enum class LayerKind { Conv, BatchNorm, ReLU, Downsample, Flatten, Dense };

struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  // Conv
  std::size_t kernel = 3;
  std::size_t in = 0;   // Conv input channels / Dense input features
  std::size_t out = 0;  // Conv output channels / Dense output features
  std::size_t stride = 1;
  int padding = -1;  // -1: same padding, kernel / 2
  // BatchNorm
  std::size_t channels = 0;
  // Downsample; an empty mode means "use the model's default mode"
  bool use_model_mode = true;
  DownsampleMode mode;

  static LayerSpec conv(std::size_t k, std::size_t in, std::size_t out, std::size_t stride = 1, int padding = -1);
  static LayerSpec batch_norm(std::size_t channels);
  static LayerSpec relu();
  static LayerSpec downsample();
  static LayerSpec downsample(DownsampleMode mode);
  static LayerSpec flatten();
  static LayerSpec dense(std::size_t in, std::size_t out);

  std::size_t effective_padding() const {
    return padding < 0 ? kernel / 2 : static_cast<std::size_t>(padding);
  }

  bool operator==(const LayerSpec&) const = default;
};

struct ModelConfig {
  std::string architecture = "custom";
  std::vector<LayerSpec> layers;
  Shape input{1, 28, 28};  // per-sample [C, H, W]
  std::size_t classes = 10;
  DownsampleMode downsample;
  /// When set, every stride-2 convolution becomes a stride-1 convolution
  /// followed by DwtLL with this wavelet.
  std::string strided_conv_wavelet;
  std::uint64_t seed = 0;

  bool operator==(const ModelConfig&) const = default;
};

/// Conv3x3(1->16)-BN-ReLU-Down, Conv3x3(16->32)-BN-ReLU-Down,
/// Conv3x3(32->64)-BN-ReLU-Down, Flatten, Dense->10 for 28x28 inputs.
/// The first convolution pads by 3 so the three down-samplings see 32, 16
/// and 8 pixels. DwtCat widens every following input fourfold.
ModelConfig wavecnet_mini(DownsampleMode mode, std::uint64_t seed = 0, std::size_t classes = 10);

/// The primitive layer list the model is built from: default modes resolved,
/// StridedConv turned into a stride-2 convolution, and the strided-conv
/// wavelet rewrite applied.
std::vector<LayerSpec> expand_layers(const ModelConfig& cfg);

/// Per-sample shapes before the first layer and after every expanded layer.
/// Throws InvalidConfig on incompatible shapes and OddSpatial when a
/// down-sampling sees an odd height or width.
std::vector<Shape> trace_shapes(const ModelConfig& cfg);

std::string to_string(LayerKind kind);

nlohmann::json to_json(const ModelConfig& cfg);
/// Unknown keys are rejected with InvalidConfig.
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace wavecnet::nn
