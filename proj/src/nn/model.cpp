// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/nn/model.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "wavecnet/error.hpp"

namespace wavecnet::nn {
namespace {

void fnv1a(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

template <class T>
void init_uniform(Tensor<T>& w, std::size_t fan_in, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : w.storage()) v = static_cast<T>(dist(rng));
}

}  // namespace

template <class T>
Model<T>::Model(ModelConfig cfg) : config_(std::move(cfg)) {
  trace_shapes(config_);
  specs_ = expand_layers(config_);
  std::mt19937_64 rng(config_.seed);
  for (const auto& spec : specs_) {
    auto layer = make_layer<T>(spec);
    if (spec.kind == LayerKind::Conv) {
      init_uniform(static_cast<Conv2d<T>&>(*layer).weight().value, spec.in * spec.kernel * spec.kernel, rng);
    } else if (spec.kind == LayerKind::Dense) {
      init_uniform(static_cast<Dense<T>&>(*layer).weight().value, spec.in, rng);
    }
    layers_.push_back(std::move(layer));
  }
}

template <class T>
std::size_t Model<T>::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers_) {
    for (const auto* p : l->parameters()) total += p->value.size();
  }
  return total;
}

template <class T>
void Model<T>::check_input(const Tensor<T>& x) const {
  if (x.rank() != 4 || Shape(x.shape().begin() + 1, x.shape().end()) != config_.input) {
    throw Error(Errc::ShapeMismatch,
                "model expects [N," + shape_string(config_.input).substr(1) + " input, got " + shape_string(x.shape()));
  }
}

template <class T>
Tensor<T> Model<T>::forward(const Tensor<T>& x) {
  check_input(x);
  Tensor<T> a = x;
  for (auto& l : layers_) a = l->forward(a);
  return a;
}

template <class T>
Tensor<T> Model<T>::backward(const Tensor<T>& dlogits) {
  Tensor<T> g = dlogits;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <class T>
Tensor<T> Model<T>::infer(const Tensor<T>& x) const {
  check_input(x);
  Tensor<T> a = x;
  for (const auto& l : layers_) a = l->infer(a);
  return a;
}

template <class T>
std::vector<Parameter<T>*> Model<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& l : layers_) {
    for (auto* p : l->parameters()) out.push_back(p);
  }
  return out;
}

template <class T>
void Model<T>::zero_grad() {
  for (auto* p : parameters()) std::fill(p->grad.storage().begin(), p->grad.storage().end(), T{});
}

template <class T>
std::uint64_t Model<T>::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& l : layers_) {
    auto& mut = const_cast<Layer<T>&>(*l);
    for (const auto* p : mut.parameters()) fnv1a(h, p->value.data().data(), p->value.size() * sizeof(T));
    for (const auto& [name, b] : mut.buffers()) fnv1a(h, b->data().data(), b->size() * sizeof(T));
  }
  return h;
}

template <class T>
std::vector<std::size_t> Model<T>::predict(const Tensor<float>& images) const {
  Tensor<T> logits;
  if constexpr (std::is_same_v<T, float>) {
    logits = infer(images);
  } else {
    logits = infer(images.cast<T>());
  }
  return argmax_rows<T>(logits.data(), logits.dim(1));
}

template <class T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw Error(Errc::ShapeMismatch, "logits " + shape_string(logits.shape()) + " do not match " +
                                         std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  LossResult<T> r;
  r.grad = Tensor<T>(logits.shape());
  const auto pred = argmax_rows<T>(logits.data(), k);
  double total = 0.0;
  std::vector<double> p(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= k) throw Error(Errc::InvalidArgument, "label out of range");
    const T* z = logits.data().data() + i * k;
    double mx = z[0];
    for (std::size_t j = 1; j < k; ++j) mx = std::max<double>(mx, z[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p[j] = std::exp(static_cast<double>(z[j]) - mx);
      sum += p[j];
    }
    total += std::log(sum) - (static_cast<double>(z[labels[i]]) - mx);
    for (std::size_t j = 0; j < k; ++j) {
      const double target = j == labels[i] ? 1.0 : 0.0;
      r.grad[i * k + j] = static_cast<T>((p[j] / sum - target) / static_cast<double>(n));
    }
    r.correct += pred[i] == labels[i];
  }
  r.loss = total / static_cast<double>(n);
  return r;
}

template class Model<float>;
template class Model<double>;
template LossResult<float> softmax_cross_entropy(const Tensor<float>&, std::span<const std::size_t>);
template LossResult<double> softmax_cross_entropy(const Tensor<double>&, std::span<const std::size_t>);

}  // namespace wavecnet::nn
