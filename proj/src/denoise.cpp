// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/denoise.hpp"

#include <string>

#include "wavecnet/error.hpp"
#include "wavecnet/filterbank.hpp"
#include "wavecnet/transform.hpp"

namespace wavecnet {
namespace {

template <class T>
void check_lambda(T lambda) {
  if (!(lambda >= T{0})) {
    throw Error(Errc::NegativeLambda, "threshold must be non-negative, got " + std::to_string(lambda));
  }
}

}  // namespace

template <class T>
T soft_shrink(T x, T lambda) {
  check_lambda(lambda);
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return T{0};
}

template <class T>
void soft_shrink_in_place(std::span<T> values, T lambda) {
  check_lambda(lambda);
  for (T& v : values) {
    if (v > lambda) {
      v -= lambda;
    } else if (v < -lambda) {
      v += lambda;
    } else {
      v = T{0};
    }
  }
}

template <class T>
Matrix<T> denoise_image(const Matrix<T>& image, const DenoiseConfig& cfg) {
  const T lambda = static_cast<T>(cfg.lambda);
  check_lambda(lambda);
  const auto& spec = get_wavelet(cfg.wavelet);
  auto d = dwt2d(image, spec);
  soft_shrink_in_place<T>(d.lh.data, lambda);
  soft_shrink_in_place<T>(d.hl.data, lambda);
  soft_shrink_in_place<T>(d.hh.data, lambda);
  return idwt2d(d, spec);
}

template <class T>
Tensor<T> denoise_image(const Tensor<T>& image, const DenoiseConfig& cfg) {
  if (image.rank() < 2 || image.rank() > 4) {
    throw Error(Errc::ShapeMismatch, "expected [H,W], [C,H,W] or [N,C,H,W], got " + shape_string(image.shape()));
  }
  const std::size_t h = image.dim(image.rank() - 2), w = image.dim(image.rank() - 1);
  const std::size_t planes = image.size() / (h * w);
  Tensor<T> out(image.shape());
  for (std::size_t p = 0; p < planes; ++p) {
    const auto src = image.data().subspan(p * h * w, h * w);
    const auto denoised = denoise_image(Matrix<T>(h, w, std::vector<T>(src.begin(), src.end())), cfg);
    std::copy(denoised.data.begin(), denoised.data.end(), out.data().begin() + static_cast<long>(p * h * w));
  }
  return out;
}

template float soft_shrink<float>(float, float);
template double soft_shrink<double>(double, double);
template void soft_shrink_in_place<float>(std::span<float>, float);
template void soft_shrink_in_place<double>(std::span<double>, double);
template Matrix<float> denoise_image<float>(const Matrix<float>&, const DenoiseConfig&);
template Matrix<double> denoise_image<double>(const Matrix<double>&, const DenoiseConfig&);
template Tensor<float> denoise_image<float>(const Tensor<float>&, const DenoiseConfig&);
template Tensor<double> denoise_image<double>(const Tensor<double>&, const DenoiseConfig&);

}  // namespace wavecnet
