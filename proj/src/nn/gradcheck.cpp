// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

namespace wavecnet::nn {
namespace {

std::vector<std::size_t> pick(std::size_t n, std::size_t samples, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n <= samples) return idx;
  for (std::size_t i = 0; i < samples; ++i) std::swap(idx[i], idx[i + rng() % (n - i)]);
  idx.resize(samples);
  return idx;
}

// Probes coordinates of `values` against the matching analytic gradient.
void probe(std::vector<double>& values, const std::vector<double>& analytic, const std::string& label,
           const std::function<double()>& objective, const GradcheckOptions& opt, std::mt19937_64& rng,
           GradcheckResult& result) {
  for (std::size_t i : pick(values.size(), opt.samples, rng)) {
    const double saved = values[i];
    values[i] = saved + opt.epsilon;
    const double up = objective();
    values[i] = saved - opt.epsilon;
    const double down = objective();
    values[i] = saved;
    const double numeric = (up - down) / (2.0 * opt.epsilon);
    const double err = std::abs(analytic[i] - numeric) / std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
    ++result.checked;
    if (result.worst.empty() || err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst = label + "[" + std::to_string(i) + "]";
    }
  }
}

}  // namespace

GradcheckResult gradcheck(Layer<double>& layer, const Tensor<double>& input, const GradcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  Tensor<double> x = input;
  const Tensor<double> y0 = layer.forward(x);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor<double> r(y0.shape());
  for (auto& v : r.storage()) v = dist(rng);

  for (auto* p : layer.parameters()) std::fill(p->grad.storage().begin(), p->grad.storage().end(), 0.0);
  layer.forward(x);
  const Tensor<double> dx = layer.backward(r);

  auto objective = [&] {
    const auto y = layer.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += r[i] * y[i];
    return s;
  };

  GradcheckResult result;
  probe(x.storage(), dx.storage(), "input", objective, opt, rng, result);
  if (opt.parameters) {
    for (auto* p : layer.parameters()) {
      const std::vector<double> analytic = p->grad.storage();
      probe(p->value.storage(), analytic, p->name, objective, opt, rng, result);
    }
  }
  return result;
}

GradcheckResult gradcheck(Model<double>& model, const Tensor<double>& input, std::span<const std::size_t> labels,
                          const GradcheckOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  Tensor<double> x = input;
  model.zero_grad();
  const auto loss = softmax_cross_entropy(model.forward(x), labels);
  const Tensor<double> dx = model.backward(loss.grad);

  auto objective = [&] { return softmax_cross_entropy(model.forward(x), labels).loss; };

  GradcheckResult result;
  probe(x.storage(), dx.storage(), "input", objective, opt, rng, result);
  if (opt.parameters) {
    std::size_t k = 0;
    for (auto* p : model.parameters()) {
      const std::vector<double> analytic = p->grad.storage();
      probe(p->value.storage(), analytic, "param" + std::to_string(k++) + "." + p->name, objective, opt, rng,
            result);
    }
  }
  return result;
}

}  // namespace wavecnet::nn
