// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wavecnet/nn/config.hpp"
#include "wavecnet/tensor.hpp"

namespace wavecnet::nn {

template <class T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

/// A layer keeps what its backward pass needs from the last training-mode
/// forward call. infer() is const and may run concurrently.
template <class T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual std::string describe() const = 0;

  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  /// Gradient with respect to the last forward input. Parameter gradients
  /// are accumulated into Parameter::grad.
  virtual Tensor<T> backward(const Tensor<T>& upstream) = 0;
  virtual Tensor<T> infer(const Tensor<T>& x) const = 0;

  virtual std::vector<Parameter<T>*> parameters() { return {}; }
  /// Non-trainable state saved in checkpoints (batch-norm running stats).
  virtual std::vector<std::pair<std::string, Tensor<T>*>> buffers() { return {}; }
};

// Stateless kernels. Weights are [O, C, K, K], bias [O]; x is [N, C, H, W].

template <class T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& bias, std::size_t stride,
                         std::size_t padding);

template <class T>
struct ConvGrads {
  Tensor<T> x;
  Tensor<T> weights;
  Tensor<T> bias;
};

template <class T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& upstream,
                             std::size_t stride, std::size_t padding);

/// Halves H and W. Throws OddSpatial for odd sizes. StridedConv is not a
/// kernel here (it is a convolution) and throws InvalidArgument.
template <class T>
Tensor<T> downsample_forward(const Tensor<T>& x, const DownsampleMode& mode);

/// Needs the forward input for max-pool routing; other modes use its shape.
template <class T>
Tensor<T> downsample_backward(const Tensor<T>& x, const Tensor<T>& upstream, const DownsampleMode& mode);

template <class T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride, std::size_t padding);

  LayerKind kind() const override { return LayerKind::Conv; }
  std::string describe() const override;
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }

  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }
  std::size_t stride() const { return stride_; }
  std::size_t padding() const { return padding_; }

 private:
  Parameter<T> weight_;
  Parameter<T> bias_;
  std::size_t stride_;
  std::size_t padding_;
  Tensor<T> input_;
};

template <class T>
class BatchNorm2d final : public Layer<T> {
 public:
  explicit BatchNorm2d(std::size_t channels, double momentum = 0.1, double eps = 1e-5);

  LayerKind kind() const override { return LayerKind::BatchNorm; }
  std::string describe() const override;
  /// Normalizes with batch statistics and updates the running ones.
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  /// Normalizes with the running statistics.
  Tensor<T> infer(const Tensor<T>& x) const override;
  std::vector<Parameter<T>*> parameters() override { return {&gamma_, &beta_}; }
  std::vector<std::pair<std::string, Tensor<T>*>> buffers() override {
    return {{"running_mean", &running_mean_}, {"running_var", &running_var_}};
  }

  const Tensor<T>& running_mean() const { return running_mean_; }
  const Tensor<T>& running_var() const { return running_var_; }

 private:
  std::size_t channels_;
  double momentum_;
  double eps_;
  Parameter<T> gamma_;
  Parameter<T> beta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
  Tensor<T> xhat_;
  std::vector<double> inv_std_;
};

template <class T>
class ReLU final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::ReLU; }
  std::string describe() const override { return "relu"; }
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  Tensor<T> infer(const Tensor<T>& x) const override;

 private:
  Tensor<T> input_;
};

template <class T>
class Downsample final : public Layer<T> {
 public:
  explicit Downsample(DownsampleMode mode);

  LayerKind kind() const override { return LayerKind::Downsample; }
  std::string describe() const override { return "downsample " + mode_.to_string(); }
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  const DownsampleMode& mode() const { return mode_; }

 private:
  DownsampleMode mode_;
  Tensor<T> input_;
};

template <class T>
class Flatten final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::Flatten; }
  std::string describe() const override { return "flatten"; }
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  Tensor<T> infer(const Tensor<T>& x) const override;

 private:
  Shape input_shape_;
};

/// y = x W^T + b with x [N, in], W [out, in].
template <class T>
class Dense final : public Layer<T> {
 public:
  Dense(std::size_t in, std::size_t out);

  LayerKind kind() const override { return LayerKind::Dense; }
  std::string describe() const override;
  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> backward(const Tensor<T>& upstream) override;
  Tensor<T> infer(const Tensor<T>& x) const override;
  std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }

  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }

 private:
  Parameter<T> weight_;
  Parameter<T> bias_;
  Tensor<T> input_;
};

/// Builds one primitive layer (as produced by expand_layers) with zeroed
/// parameters.
template <class T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec);

}  // namespace wavecnet::nn
