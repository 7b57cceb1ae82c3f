// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "blas.hpp"
#include "wavecnet/error.hpp"
#include "wavecnet/filterbank.hpp"
#include "wavecnet/transform.hpp"

namespace wavecnet::nn {
namespace {

void require_rank4(const Shape& s, const char* what) {
  if (s.size() != 4) throw Error(Errc::ShapeMismatch, std::string(what) + " expects [N,C,H,W], got " + shape_string(s));
}

struct ConvGeometry {
  std::size_t n, c, h, w, o, k, ho, wo, stride, pad;
  std::size_t patch() const { return c * k * k; }
  std::size_t positions() const { return ho * wo; }
};

template <class T>
ConvGeometry conv_geometry(const Shape& x, const Shape& weights, std::size_t stride, std::size_t padding) {
  require_rank4(x, "conv2d");
  if (weights.size() != 4 || weights[2] != weights[3]) {
    throw Error(Errc::ShapeMismatch, "conv2d weights must be [O,C,K,K], got " + shape_string(weights));
  }
  if (weights[1] != x[1]) {
    throw Error(Errc::ShapeMismatch, "conv2d weights take " + std::to_string(weights[1]) + " channels, input has " +
                                         std::to_string(x[1]));
  }
  if (stride == 0) throw Error(Errc::InvalidArgument, "conv2d stride must be positive");
  const std::size_t k = weights[2];
  if (x[2] + 2 * padding < k || x[3] + 2 * padding < k) {
    throw Error(Errc::ShapeMismatch, "conv2d kernel larger than padded input");
  }
  return {x[0],     x[1], x[2], x[3], weights[0], k, (x[2] + 2 * padding - k) / stride + 1,
          (x[3] + 2 * padding - k) / stride + 1, stride, padding};
}

// col[(c*K + ki)*K + kj][oh*Wo + ow] = x[c][oh*s + ki - p][ow*s + kj - p], zero outside.
template <class T>
void im2col(const T* x, const ConvGeometry& g, T* col) {
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t ki = 0; ki < g.k; ++ki) {
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        T* dst = col + ((c * g.k + ki) * g.k + kj) * g.positions();
        for (std::size_t oh = 0; oh < g.ho; ++oh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride + ki) - static_cast<std::ptrdiff_t>(g.pad);
          T* row = dst + oh * g.wo;
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.h)) {
            std::fill(row, row + g.wo, T{});
            continue;
          }
          const T* src = x + (c * g.h + static_cast<std::size_t>(ih)) * g.w;
          for (std::size_t ow = 0; ow < g.wo; ++ow) {
            const std::ptrdiff_t iw =
                static_cast<std::ptrdiff_t>(ow * g.stride + kj) - static_cast<std::ptrdiff_t>(g.pad);
            row[ow] = (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.w)) ? T{} : src[iw];
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-add the columns back into x.
template <class T>
void col2im_add(const T* col, const ConvGeometry& g, T* x) {
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t ki = 0; ki < g.k; ++ki) {
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        const T* src = col + ((c * g.k + ki) * g.k + kj) * g.positions();
        for (std::size_t oh = 0; oh < g.ho; ++oh) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride + ki) - static_cast<std::ptrdiff_t>(g.pad);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.h)) continue;
          T* dst = x + (c * g.h + static_cast<std::size_t>(ih)) * g.w;
          const T* row = src + oh * g.wo;
          for (std::size_t ow = 0; ow < g.wo; ++ow) {
            const std::ptrdiff_t iw =
                static_cast<std::ptrdiff_t>(ow * g.stride + kj) - static_cast<std::ptrdiff_t>(g.pad);
            if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(g.w)) dst[iw] += row[ow];
          }
        }
      }
    }
  }
}

Shape half_shape(const Shape& s, std::size_t channel_factor) {
  require_rank4(s, "downsample");
  if (s[2] % 2 != 0 || s[3] % 2 != 0) {
    throw Error(Errc::OddSpatial, "down-sampling needs even height and width, got " + shape_string(s));
  }
  return {s[0], s[1] * channel_factor, s[2] / 2, s[3] / 2};
}

}  // namespace

template <class T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& bias, std::size_t stride,
                         std::size_t padding) {
  const auto g = conv_geometry<T>(x.shape(), weights.shape(), stride, padding);
  if (bias.size() != g.o) throw Error(Errc::ShapeMismatch, "conv2d bias length must equal output channels");
  Tensor<T> out({g.n, g.o, g.ho, g.wo});
  std::vector<T> col(g.patch() * g.positions());
  const std::size_t in_per = g.c * g.h * g.w, out_per = g.o * g.positions();
  for (std::size_t n = 0; n < g.n; ++n) {
    T* y = out.data().data() + n * out_per;
    for (std::size_t o = 0; o < g.o; ++o) std::fill(y + o * g.positions(), y + (o + 1) * g.positions(), bias[o]);
    if (g.k == 1 && g.stride == 1 && g.pad == 0) {
      blas::gemm(false, false, g.o, g.positions(), g.c, T{1}, weights.data().data(), g.c,
                 x.data().data() + n * in_per, g.positions(), T{1}, y, g.positions());
      continue;
    }
    im2col(x.data().data() + n * in_per, g, col.data());
    blas::gemm(false, false, g.o, g.positions(), g.patch(), T{1}, weights.data().data(), g.patch(), col.data(),
               g.positions(), T{1}, y, g.positions());
  }
  return out;
}

template <class T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& upstream,
                             std::size_t stride, std::size_t padding) {
  const auto g = conv_geometry<T>(x.shape(), weights.shape(), stride, padding);
  if (upstream.shape() != Shape{g.n, g.o, g.ho, g.wo}) {
    throw Error(Errc::ShapeMismatch, "conv2d upstream gradient has shape " + shape_string(upstream.shape()));
  }
  ConvGrads<T> grads{Tensor<T>(x.shape()), Tensor<T>(weights.shape()), Tensor<T>({g.o})};
  std::vector<T> col(g.patch() * g.positions());
  std::vector<T> dcol(col.size());
  const std::size_t in_per = g.c * g.h * g.w, out_per = g.o * g.positions();
  for (std::size_t n = 0; n < g.n; ++n) {
    const T* dy = upstream.data().data() + n * out_per;
    for (std::size_t o = 0; o < g.o; ++o) {
      T acc{};
      for (std::size_t p = 0; p < g.positions(); ++p) acc += dy[o * g.positions() + p];
      grads.bias[o] += acc;
    }
    im2col(x.data().data() + n * in_per, g, col.data());
    // dW += dY col^T, dcol = W^T dY
    blas::gemm(false, true, g.o, g.patch(), g.positions(), T{1}, dy, g.positions(), col.data(), g.positions(), T{1},
               grads.weights.data().data(), g.patch());
    blas::gemm(true, false, g.patch(), g.positions(), g.o, T{1}, weights.data().data(), g.patch(), dy, g.positions(),
               T{0}, dcol.data(), g.positions());
    col2im_add(dcol.data(), g, grads.x.data().data() + n * in_per);
  }
  return grads;
}

template <class T>
Tensor<T> downsample_forward(const Tensor<T>& x, const DownsampleMode& mode) {
  const Shape out_shape = half_shape(x.shape(), mode.channel_factor());
  switch (mode.kind) {
    case DownsampleKind::MaxPool2:
    case DownsampleKind::AvgPool2: {
      Tensor<T> out(out_shape);
      const std::size_t h = x.dim(2), w = x.dim(3), ho = h / 2, wo = w / 2;
      const bool is_max = mode.kind == DownsampleKind::MaxPool2;
      for (std::size_t p = 0; p < x.dim(0) * x.dim(1); ++p) {
        const T* src = x.data().data() + p * h * w;
        T* dst = out.data().data() + p * ho * wo;
        for (std::size_t i = 0; i < ho; ++i) {
          for (std::size_t j = 0; j < wo; ++j) {
            const T a = src[2 * i * w + 2 * j], b = src[2 * i * w + 2 * j + 1];
            const T c = src[(2 * i + 1) * w + 2 * j], d = src[(2 * i + 1) * w + 2 * j + 1];
            if (is_max) {
              T m = a;
              if (b > m) m = b;
              if (c > m) m = c;
              if (d > m) m = d;
              dst[i * wo + j] = m;
            } else {
              dst[i * wo + j] = (a + b + c + d) / T{4};
            }
          }
        }
      }
      return out;
    }
    case DownsampleKind::DwtLL:
      return dwt2d_ll_batch(x, get_wavelet(mode.wavelet));
    case DownsampleKind::DwtAvg: {
      auto bands = dwt2d_batch(x, get_wavelet(mode.wavelet));
      Tensor<T> out = std::move(bands.ll);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] + bands.lh[i] + bands.hl[i] + bands.hh[i]) / T{4};
      return out;
    }
    case DownsampleKind::DwtCat: {
      const auto bands = dwt2d_batch(x, get_wavelet(mode.wavelet));
      Tensor<T> out(out_shape);
      const std::size_t block = x.dim(1) * out_shape[2] * out_shape[3];
      const Tensor<T>* parts[4] = {&bands.ll, &bands.lh, &bands.hl, &bands.hh};
      for (std::size_t n = 0; n < x.dim(0); ++n) {
        for (std::size_t b = 0; b < 4; ++b) {
          std::copy_n(parts[b]->data().begin() + n * block, block, out.data().begin() + (4 * n + b) * block);
        }
      }
      return out;
    }
    case DownsampleKind::StridedConv:
      break;
  }
  throw Error(Errc::InvalidArgument, "strided_conv is a convolution, not a down-sampling kernel");
}

template <class T>
Tensor<T> downsample_backward(const Tensor<T>& x, const Tensor<T>& upstream, const DownsampleMode& mode) {
  const Shape out_shape = half_shape(x.shape(), mode.channel_factor());
  if (upstream.shape() != out_shape) {
    throw Error(Errc::ShapeMismatch, "down-sampling upstream gradient has shape " + shape_string(upstream.shape()));
  }
  const std::size_t h = x.dim(2), w = x.dim(3);
  switch (mode.kind) {
    case DownsampleKind::MaxPool2:
    case DownsampleKind::AvgPool2: {
      Tensor<T> dx(x.shape());
      const std::size_t ho = h / 2, wo = w / 2;
      const bool is_max = mode.kind == DownsampleKind::MaxPool2;
      for (std::size_t p = 0; p < x.dim(0) * x.dim(1); ++p) {
        const T* src = x.data().data() + p * h * w;
        const T* g = upstream.data().data() + p * ho * wo;
        T* dst = dx.data().data() + p * h * w;
        for (std::size_t i = 0; i < ho; ++i) {
          for (std::size_t j = 0; j < wo; ++j) {
            const std::size_t idx[4] = {2 * i * w + 2 * j, 2 * i * w + 2 * j + 1, (2 * i + 1) * w + 2 * j,
                                        (2 * i + 1) * w + 2 * j + 1};
            if (is_max) {
              std::size_t best = idx[0];
              for (std::size_t q = 1; q < 4; ++q) {
                if (src[idx[q]] > src[best]) best = idx[q];
              }
              dst[best] += g[i * wo + j];
            } else {
              for (std::size_t q : idx) dst[q] += g[i * wo + j] / T{4};
            }
          }
        }
      }
      return dx;
    }
    case DownsampleKind::DwtLL:
      return dwt2d_ll_batch_vjp(upstream, get_wavelet(mode.wavelet), h, w);
    case DownsampleKind::DwtAvg: {
      Tensor<T> quarter = upstream;
      for (std::size_t i = 0; i < quarter.size(); ++i) quarter[i] /= T{4};
      BatchSubbands<T> b{quarter, quarter, quarter, quarter};
      return dwt2d_batch_vjp(b, get_wavelet(mode.wavelet), h, w);
    }
    case DownsampleKind::DwtCat: {
      const Shape band_shape{x.dim(0), x.dim(1), h / 2, w / 2};
      BatchSubbands<T> b{Tensor<T>(band_shape), Tensor<T>(band_shape), Tensor<T>(band_shape), Tensor<T>(band_shape)};
      Tensor<T>* parts[4] = {&b.ll, &b.lh, &b.hl, &b.hh};
      const std::size_t block = x.dim(1) * (h / 2) * (w / 2);
      for (std::size_t n = 0; n < x.dim(0); ++n) {
        for (std::size_t q = 0; q < 4; ++q) {
          std::copy_n(upstream.data().begin() + (4 * n + q) * block, block, parts[q]->data().begin() + n * block);
        }
      }
      return dwt2d_batch_vjp(b, get_wavelet(mode.wavelet), h, w);
    }
    case DownsampleKind::StridedConv:
      break;
  }
  throw Error(Errc::InvalidArgument, "strided_conv is a convolution, not a down-sampling kernel");
}

// Conv2d

template <class T>
Conv2d<T>::Conv2d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride, std::size_t padding)
    : weight_{"weight", Tensor<T>({out, in, kernel, kernel}), Tensor<T>({out, in, kernel, kernel})},
      bias_{"bias", Tensor<T>({out}), Tensor<T>({out})},
      stride_(stride),
      padding_(padding) {}

template <class T>
std::string Conv2d<T>::describe() const {
  const auto& s = weight_.value.shape();
  return "conv " + std::to_string(s[2]) + "x" + std::to_string(s[3]) + " " + std::to_string(s[1]) + "->" +
         std::to_string(s[0]) + " stride " + std::to_string(stride_) + " pad " + std::to_string(padding_);
}

template <class T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return conv2d_forward(x, weight_.value, bias_.value, stride_, padding_);
}

template <class T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& upstream) {
  auto g = conv2d_backward(input_, weight_.value, upstream, stride_, padding_);
  for (std::size_t i = 0; i < g.weights.size(); ++i) weight_.grad[i] += g.weights[i];
  for (std::size_t i = 0; i < g.bias.size(); ++i) bias_.grad[i] += g.bias[i];
  return std::move(g.x);
}

template <class T>
Tensor<T> Conv2d<T>::infer(const Tensor<T>& x) const {
  return conv2d_forward(x, weight_.value, bias_.value, stride_, padding_);
}

// BatchNorm2d

template <class T>
BatchNorm2d<T>::BatchNorm2d(std::size_t channels, double momentum, double eps)
    : channels_(channels),
      momentum_(momentum),
      eps_(eps),
      gamma_{"gamma", Tensor<T>({channels}, T{1}), Tensor<T>({channels})},
      beta_{"beta", Tensor<T>({channels}), Tensor<T>({channels})},
      running_mean_({channels}),
      running_var_({channels}, T{1}) {}

template <class T>
std::string BatchNorm2d<T>::describe() const {
  return "batch_norm " + std::to_string(channels_);
}

template <class T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x) {
  require_rank4(x.shape(), "batch_norm");
  if (x.dim(1) != channels_) throw Error(Errc::ShapeMismatch, "batch_norm channel count mismatch");
  const std::size_t n = x.dim(0), hw = x.dim(2) * x.dim(3), m = n * hw;
  Tensor<T> out(x.shape());
  xhat_ = Tensor<T>(x.shape());
  inv_std_.assign(channels_, 0.0);
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const auto p = x.plane(s, c);
      for (T v : p) sum += v;
    }
    const double mean = sum / static_cast<double>(m);
    double sq = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      for (T v : x.plane(s, c)) sq += (v - mean) * (v - mean);
    }
    const double var = sq / static_cast<double>(m);
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = inv;
    const double gm = gamma_.value[c], bt = beta_.value[c];
    for (std::size_t s = 0; s < n; ++s) {
      const auto src = x.plane(s, c);
      auto xh = xhat_.plane(s, c);
      auto dst = out.plane(s, c);
      for (std::size_t i = 0; i < hw; ++i) {
        const double v = (src[i] - mean) * inv;
        xh[i] = static_cast<T>(v);
        dst[i] = static_cast<T>(gm * v + bt);
      }
    }
    const double unbiased = m > 1 ? sq / static_cast<double>(m - 1) : var;
    running_mean_[c] = static_cast<T>((1.0 - momentum_) * running_mean_[c] + momentum_ * mean);
    running_var_[c] = static_cast<T>((1.0 - momentum_) * running_var_[c] + momentum_ * unbiased);
  }
  return out;
}

template <class T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& upstream) {
  if (upstream.shape() != xhat_.shape()) throw Error(Errc::ShapeMismatch, "batch_norm upstream shape mismatch");
  const std::size_t n = upstream.dim(0), hw = upstream.dim(2) * upstream.dim(3);
  const double m = static_cast<double>(n * hw);
  Tensor<T> dx(upstream.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const auto g = upstream.plane(s, c);
      const auto xh = xhat_.plane(s, c);
      for (std::size_t i = 0; i < hw; ++i) {
        sum_g += g[i];
        sum_gx += static_cast<double>(g[i]) * xh[i];
      }
    }
    beta_.grad[c] += static_cast<T>(sum_g);
    gamma_.grad[c] += static_cast<T>(sum_gx);
    const double scale = gamma_.value[c] * inv_std_[c] / m;
    for (std::size_t s = 0; s < n; ++s) {
      const auto g = upstream.plane(s, c);
      const auto xh = xhat_.plane(s, c);
      auto d = dx.plane(s, c);
      for (std::size_t i = 0; i < hw; ++i) d[i] = static_cast<T>(scale * (m * g[i] - sum_g - xh[i] * sum_gx));
    }
  }
  return dx;
}

template <class T>
Tensor<T> BatchNorm2d<T>::infer(const Tensor<T>& x) const {
  require_rank4(x.shape(), "batch_norm");
  if (x.dim(1) != channels_) throw Error(Errc::ShapeMismatch, "batch_norm channel count mismatch");
  Tensor<T> out(x.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(running_var_[c]) + eps_);
    const T a = static_cast<T>(gamma_.value[c] * inv);
    const T b = static_cast<T>(beta_.value[c] - gamma_.value[c] * inv * running_mean_[c]);
    for (std::size_t s = 0; s < x.dim(0); ++s) {
      const auto src = x.plane(s, c);
      auto dst = out.plane(s, c);
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = a * src[i] + b;
    }
  }
  return out;
}

// ReLU

template <class T>
Tensor<T> ReLU<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return infer(x);
}

template <class T>
Tensor<T> ReLU<T>::backward(const Tensor<T>& upstream) {
  if (upstream.shape() != input_.shape()) throw Error(Errc::ShapeMismatch, "relu upstream shape mismatch");
  Tensor<T> dx(upstream.shape());
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = input_[i] > T{0} ? upstream[i] : T{0};
  return dx;
}

template <class T>
Tensor<T> ReLU<T>::infer(const Tensor<T>& x) const {
  Tensor<T> out = x;
  for (auto& v : out.storage()) v = v > T{0} ? v : T{0};
  return out;
}

// Downsample

template <class T>
Downsample<T>::Downsample(DownsampleMode mode) : mode_(std::move(mode)) {
  if (mode_.kind == DownsampleKind::StridedConv) {
    throw Error(Errc::InvalidConfig, "strided_conv must be expanded into a convolution");
  }
  if (mode_.is_wavelet()) get_wavelet(mode_.wavelet);
}

template <class T>
Tensor<T> Downsample<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return downsample_forward(x, mode_);
}

template <class T>
Tensor<T> Downsample<T>::backward(const Tensor<T>& upstream) {
  return downsample_backward(input_, upstream, mode_);
}

template <class T>
Tensor<T> Downsample<T>::infer(const Tensor<T>& x) const {
  return downsample_forward(x, mode_);
}

// Flatten

template <class T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x) {
  input_shape_ = x.shape();
  return infer(x);
}

template <class T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& upstream) {
  return upstream.reshaped(input_shape_);
}

template <class T>
Tensor<T> Flatten<T>::infer(const Tensor<T>& x) const {
  if (x.rank() < 2) throw Error(Errc::ShapeMismatch, "flatten needs a batch dimension");
  return x.reshaped({x.dim(0), x.size() / x.dim(0)});
}

// Dense

template <class T>
Dense<T>::Dense(std::size_t in, std::size_t out)
    : weight_{"weight", Tensor<T>({out, in}), Tensor<T>({out, in})},
      bias_{"bias", Tensor<T>({out}), Tensor<T>({out})} {}

template <class T>
std::string Dense<T>::describe() const {
  return "dense " + std::to_string(weight_.value.dim(1)) + "->" + std::to_string(weight_.value.dim(0));
}

template <class T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) {
  input_ = x;
  return infer(x);
}

template <class T>
Tensor<T> Dense<T>::infer(const Tensor<T>& x) const {
  const std::size_t in = weight_.value.dim(1), out = weight_.value.dim(0);
  if (x.rank() != 2 || x.dim(1) != in) {
    throw Error(Errc::ShapeMismatch, "dense expects [N," + std::to_string(in) + "], got " + shape_string(x.shape()));
  }
  const std::size_t n = x.dim(0);
  Tensor<T> y({n, out});
  for (std::size_t i = 0; i < n; ++i) std::copy_n(bias_.value.data().begin(), out, y.data().begin() + i * out);
  blas::gemm(false, true, n, out, in, T{1}, x.data().data(), in, weight_.value.data().data(), in, T{1},
             y.data().data(), out);
  return y;
}

template <class T>
Tensor<T> Dense<T>::backward(const Tensor<T>& upstream) {
  const std::size_t in = weight_.value.dim(1), out = weight_.value.dim(0), n = input_.dim(0);
  if (upstream.shape() != Shape{n, out}) throw Error(Errc::ShapeMismatch, "dense upstream shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t o = 0; o < out; ++o) bias_.grad[o] += upstream[i * out + o];
  }
  blas::gemm(true, false, out, in, n, T{1}, upstream.data().data(), out, input_.data().data(), in, T{1},
             weight_.grad.data().data(), in);
  Tensor<T> dx({n, in});
  blas::gemm(false, false, n, in, out, T{1}, upstream.data().data(), out, weight_.value.data().data(), in, T{0},
             dx.data().data(), in);
  return dx;
}

template <class T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::Conv:
      return std::make_unique<Conv2d<T>>(spec.in, spec.out, spec.kernel, spec.stride, spec.effective_padding());
    case LayerKind::BatchNorm: return std::make_unique<BatchNorm2d<T>>(spec.channels);
    case LayerKind::ReLU: return std::make_unique<ReLU<T>>();
    case LayerKind::Downsample: return std::make_unique<Downsample<T>>(spec.mode);
    case LayerKind::Flatten: return std::make_unique<Flatten<T>>();
    case LayerKind::Dense: return std::make_unique<Dense<T>>(spec.in, spec.out);
  }
  throw Error(Errc::InvalidConfig, "unknown layer kind");
}

#define WAVECNET_INSTANTIATE(T)                                                                                 \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,          \
                                    std::size_t);                                                               \
  template ConvGrads<T> conv2d_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,      \
                                        std::size_t);                                                           \
  template Tensor<T> downsample_forward(const Tensor<T>&, const DownsampleMode&);                               \
  template Tensor<T> downsample_backward(const Tensor<T>&, const Tensor<T>&, const DownsampleMode&);            \
  template class Conv2d<T>;                                                                                     \
  template class BatchNorm2d<T>;                                                                                \
  template class ReLU<T>;                                                                                       \
  template class Downsample<T>;                                                                                 \
  template class Flatten<T>;                                                                                    \
  template class Dense<T>;                                                                                      \
  template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&);

WAVECNET_INSTANTIATE(float)
WAVECNET_INSTANTIATE(double)
#undef WAVECNET_INSTANTIATE

}  // namespace wavecnet::nn
