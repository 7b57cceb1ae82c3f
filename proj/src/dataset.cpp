// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/dataset.hpp"

#include <algorithm>
#include <thread>

#include "wavecnet/error.hpp"

namespace wavecnet {

void Dataset::validate(std::size_t classes) const {
  if (images.rank() != 4) {
    throw Error(Errc::ShapeMismatch, "dataset images must be [N,C,H,W], got " + shape_string(images.shape()));
  }
  if (images.dim(0) != labels.size()) {
    throw Error(Errc::ShapeMismatch, std::to_string(images.dim(0)) + " images but " +
                                         std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) {
      throw Error(Errc::InvalidArgument, "label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                                             " is outside [0, " + std::to_string(classes) + ")");
    }
  }
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > size()) throw Error(Errc::InvalidArgument, "bad dataset slice");
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  return gather(idx);
}

Dataset Dataset::gather(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw Error(Errc::InvalidArgument, "empty dataset selection");
  Shape shape = images.shape();
  const std::size_t per = shape_size(sample_shape());
  shape[0] = indices.size();
  std::vector<float> data(indices.size() * per);
  std::vector<std::size_t> out_labels(indices.size());
  const auto src = images.data();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t j = indices[i];
    if (j >= size()) throw Error(Errc::InvalidArgument, "dataset index out of range");
    std::copy_n(src.begin() + j * per, per, data.begin() + i * per);
    out_labels[i] = labels[j];
  }
  return Dataset{Tensor<float>(std::move(shape), std::move(data)), std::move(out_labels)};
}

template <class T>
std::vector<std::size_t> argmax_rows(std::span<const T> logits, std::size_t classes) {
  const std::size_t n = logits.size() / classes;
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = logits.data() + i * classes;
    std::size_t best = 0;
    for (std::size_t k = 1; k < classes; ++k) {
      if (row[k] > row[best]) best = k;
    }
    out[i] = best;
  }
  return out;
}

template std::vector<std::size_t> argmax_rows<float>(std::span<const float>, std::size_t);
template std::vector<std::size_t> argmax_rows<double>(std::span<const double>, std::size_t);

std::vector<std::size_t> predict_all(const Classifier& model, const Tensor<float>& images, std::size_t batch,
                                     std::size_t threads) {
  if (images.rank() != 4) throw Error(Errc::ShapeMismatch, "images must be [N,C,H,W]");
  batch = std::max<std::size_t>(batch, 1);
  threads = std::max<std::size_t>(threads, 1);
  const std::size_t n = images.dim(0);
  const std::size_t per = images.size() / n;
  const std::size_t batches = (n + batch - 1) / batch;
  std::vector<std::size_t> out(n);

  auto run_batch = [&](std::size_t b) {
    const std::size_t begin = b * batch, end = std::min(n, begin + batch);
    Shape shape = images.shape();
    shape[0] = end - begin;
    const auto src = images.data();
    Tensor<float> chunk(shape, std::vector<float>(src.begin() + begin * per, src.begin() + end * per));
    const auto pred = model.predict(chunk);
    if (pred.size() != end - begin) throw Error(Errc::ShapeMismatch, "classifier returned a wrong count");
    std::copy(pred.begin(), pred.end(), out.begin() + begin);
  };

  if (threads == 1 || batches == 1) {
    for (std::size_t b = 0; b < batches; ++b) run_batch(b);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t b = t; b < batches; b += threads) run_batch(b);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

double error_rate(const Classifier& model, const Dataset& data, std::size_t batch, std::size_t threads) {
  if (data.size() == 0) throw Error(Errc::InvalidArgument, "empty dataset");
  const auto pred = predict_all(model, data.images, batch, threads);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != data.labels[i];
  return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

}  // namespace wavecnet
