// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavecnet/tensor.hpp"

namespace wavecnet {

/// Labelled images, [N, C, H, W] with pixels in [0, 1].
struct Dataset {
  Tensor<float> images;
  std::vector<std::size_t> labels;

  std::size_t size() const { return labels.size(); }
  /// Per-sample [C, H, W].
  Shape sample_shape() const { return Shape(images.shape().begin() + 1, images.shape().end()); }

  /// Throws ShapeMismatch on a rank or count mismatch and InvalidArgument
  /// for a label outside [0, classes).
  void validate(std::size_t classes) const;

  /// Samples [begin, end) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t end) const;
  /// Samples in the given order.
  Dataset gather(std::span<const std::size_t> indices) const;
};

/// Anything that maps a batch of images to class indices.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<std::size_t> predict(const Tensor<float>& images) const = 0;
};

/// Row-wise argmax of an [N, K] array. Ties go to the lowest index.
template <class T>
std::vector<std::size_t> argmax_rows(std::span<const T> logits, std::size_t classes);

/// Predictions for the whole dataset, in batches. With threads > 1 the
/// batches are split over workers; the classifier must be safe to call
/// concurrently. The result does not depend on the thread count.
std::vector<std::size_t> predict_all(const Classifier& model, const Tensor<float>& images,
                                     std::size_t batch = 256, std::size_t threads = 1);

/// Top-1 error in [0, 1].
double error_rate(const Classifier& model, const Dataset& data, std::size_t batch = 256,
                  std::size_t threads = 1);

}  // namespace wavecnet
