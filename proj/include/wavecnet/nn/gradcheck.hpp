// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "wavecnet/nn/layers.hpp"
#include "wavecnet/nn/model.hpp"

namespace wavecnet::nn {

struct GradcheckResult {
  double max_rel_error = 0.0;  // |analytic - numeric| / max(1, |analytic|, |numeric|)
  std::size_t checked = 0;
  std::string worst;  // which coordinate gave max_rel_error
};

struct GradcheckOptions {
  double epsilon = 1e-6;
  /// Coordinates per tensor; tensors at most this large are checked fully.
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  bool parameters = true;
};

/// Central differences of sum(r * layer.forward(x)) for a fixed random r,
/// against layer.backward(r), over the input and every parameter tensor.
GradcheckResult gradcheck(Layer<double>& layer, const Tensor<double>& input, const GradcheckOptions& opt = {});

/// Same, with the model's mean cross-entropy as the objective.
GradcheckResult gradcheck(Model<double>& model, const Tensor<double>& input, std::span<const std::size_t> labels,
                          const GradcheckOptions& opt = {});

}  // namespace wavecnet::nn
