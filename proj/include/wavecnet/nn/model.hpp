// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wavecnet/dataset.hpp"
#include "wavecnet/nn/config.hpp"
#include "wavecnet/nn/layers.hpp"

namespace wavecnet::nn {

/// A sequential network built from a ModelConfig.
///
/// Conv and dense weights are drawn uniformly from ±sqrt(6 / fan_in) with a
/// 64-bit Mersenne Twister seeded by cfg.seed, in layer order; biases start
/// at zero, batch-norm gains at one. Draws are made in double and then
/// rounded, so float and double models start from the same values.
template <class T>
class Model final : public Classifier {
 public:
  /// Throws InvalidConfig (or OddSpatial) when the layer shapes do not chain.
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const { return config_; }
  const std::vector<LayerSpec>& layer_specs() const { return specs_; }
  std::size_t layer_count() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  std::size_t parameter_count() const;

  /// Training-mode pass on [N, C, H, W]; caches activations for backward().
  Tensor<T> forward(const Tensor<T>& x);
  /// Propagates d(loss)/d(logits) and accumulates parameter gradients.
  Tensor<T> backward(const Tensor<T>& dlogits);
  /// Evaluation-mode logits. Safe to call from several threads.
  Tensor<T> infer(const Tensor<T>& x) const;

  std::vector<Parameter<T>*> parameters();
  void zero_grad();

  /// FNV-1a over the raw bytes of every parameter and buffer, in order.
  std::uint64_t checksum() const;

  std::vector<std::size_t> predict(const Tensor<float>& images) const override;

 private:
  void check_input(const Tensor<T>& x) const;

  ModelConfig config_;
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

template <class T>
Model<T> build_model(const ModelConfig& cfg) {
  return Model<T>(cfg);
}

template <class T>
struct LossResult {
  double loss = 0.0;  // mean over the batch
  Tensor<T> grad;     // d(loss)/d(logits)
  std::size_t correct = 0;
};

/// Mean softmax cross-entropy over an [N, K] logit array.
template <class T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> labels);

}  // namespace wavecnet::nn
