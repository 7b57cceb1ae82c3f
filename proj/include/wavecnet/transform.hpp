// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavecnet/filterbank.hpp"
#include "wavecnet/tensor.hpp"

namespace wavecnet {

/// Truncated filter matrix with floor(n/2) rows and n columns. Row k holds
/// filter[j] at column 2k + j; taps that fall past column n - 1 are dropped.
/// Each row stores only its nonzero band.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::span<const double> filter, std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::size_t row_begin(std::size_t r) const { return first_[r]; }
  std::span<const double> row_values(std::size_t r) const {
    return std::span<const double>(values_).subspan(offset_[r], offset_[r + 1] - offset_[r]);
  }

  double at(std::size_t r, std::size_t c) const;
  std::vector<double> dense() const;

  /// y[k] = Σ_j A[k][j] x[j] over a contiguous lane.
  template <class T>
  void multiply(const T* x, T* y) const {
    for (std::size_t k = 0; k < rows_; ++k) {
      const auto vals = row_values(k);
      const T* src = x + first_[k];
      T acc{};
      for (std::size_t j = 0; j < vals.size(); ++j) acc += static_cast<T>(vals[j]) * src[j];
      y[k] = acc;
    }
  }

  /// x[j] += Σ_k A[k][j] y[k] over a contiguous lane.
  template <class T>
  void multiply_transposed_add(const T* y, T* x) const {
    for (std::size_t k = 0; k < rows_; ++k) {
      const auto vals = row_values(k);
      T* dst = x + first_[k];
      const T yk = y[k];
      for (std::size_t j = 0; j < vals.size(); ++j) dst[j] += static_cast<T>(vals[j]) * yk;
    }
  }

  /// Left-multiplies a (cols x width) block: out[k,:] = Σ_j A[k][j] in[j,:].
  template <class T>
  void multiply_rows(const T* in, std::size_t width, T* out) const {
    for (std::size_t k = 0; k < rows_; ++k) {
      T* dst = out + k * width;
      std::fill(dst, dst + width, T{});
      const auto vals = row_values(k);
      for (std::size_t j = 0; j < vals.size(); ++j) {
        const T a = static_cast<T>(vals[j]);
        const T* src = in + (first_[k] + j) * width;
        for (std::size_t w = 0; w < width; ++w) dst[w] += a * src[w];
      }
    }
  }

  /// out[j,:] += Σ_k A[k][j] in[k,:] for a (rows x width) input block.
  template <class T>
  void multiply_rows_transposed_add(const T* in, std::size_t width, T* out) const {
    for (std::size_t k = 0; k < rows_; ++k) {
      const T* src = in + k * width;
      const auto vals = row_values(k);
      for (std::size_t j = 0; j < vals.size(); ++j) {
        const T a = static_cast<T>(vals[j]);
        T* dst = out + (first_[k] + j) * width;
        for (std::size_t w = 0; w < width; ++w) dst[w] += a * src[w];
      }
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> offset_;
  std::vector<double> values_;
};

/// The four truncated matrices of one wavelet at one signal length.
struct AnalysisOperator {
  std::string wavelet;
  std::size_t signal_length = 0;
  BandedMatrix L;
  BandedMatrix H;
  BandedMatrix L_syn;
  BandedMatrix H_syn;
};

/// Builds a fresh operator. Throws TooShort when n < 2.
AnalysisOperator make_operator(const WaveletSpec& spec, std::size_t n);

/// Cached variant of make_operator keyed by (name, n). Only registry
/// wavelets are cached; other specs are rebuilt per call.
std::shared_ptr<const AnalysisOperator> build_operator(const WaveletSpec& spec, std::size_t n);

void clear_operator_cache();
std::size_t operator_cache_size();

template <class T>
struct Subbands1D {
  std::vector<T> low;
  std::vector<T> high;
};

template <class T>
struct Decomposition2D {
  Matrix<T> ll;
  Matrix<T> lh;  // row high-pass, column low-pass: H X L^T
  Matrix<T> hl;  // row low-pass, column high-pass: L X H^T
  Matrix<T> hh;
  std::pair<std::size_t, std::size_t> original_shape{0, 0};
};

template <class T>
Subbands1D<T> dwt1d(std::span<const T> signal, const WaveletSpec& spec);

template <class T>
std::vector<T> idwt1d(std::span<const T> low, std::span<const T> high, const WaveletSpec& spec,
                      std::size_t n);

/// Gradient of dwt1d: L^T u_low + H^T u_high with the analysis matrices.
template <class T>
std::vector<T> dwt1d_vjp(std::span<const T> upstream_low, std::span<const T> upstream_high,
                         const WaveletSpec& spec, std::size_t n);

/// Gradient of idwt1d: (L_syn g, H_syn g).
template <class T>
Subbands1D<T> idwt1d_vjp(std::span<const T> upstream, const WaveletSpec& spec);

template <class T>
Decomposition2D<T> dwt2d(const Matrix<T>& x, const WaveletSpec& spec);

template <class T>
Matrix<T> idwt2d(const Decomposition2D<T>& d, const WaveletSpec& spec);

/// Transpose of the dwt2d linear map, applied to subband gradients.
template <class T>
Matrix<T> dwt2d_vjp(const Decomposition2D<T>& upstream, const WaveletSpec& spec);

/// Transpose of the idwt2d linear map.
template <class T>
Decomposition2D<T> idwt2d_vjp(const Matrix<T>& upstream, const WaveletSpec& spec);

/// Four subband tensors of shape [N, C, H/2, W/2].
template <class T>
struct BatchSubbands {
  Tensor<T> ll;
  Tensor<T> lh;
  Tensor<T> hl;
  Tensor<T> hh;
};

template <class T>
BatchSubbands<T> dwt2d_batch(const Tensor<T>& x, const WaveletSpec& spec);

template <class T>
Tensor<T> idwt2d_batch(const BatchSubbands<T>& bands, const WaveletSpec& spec, std::size_t height,
                       std::size_t width);

template <class T>
Tensor<T> dwt2d_batch_vjp(const BatchSubbands<T>& upstream, const WaveletSpec& spec,
                          std::size_t height, std::size_t width);

/// ll subband only, [N, C, H/2, W/2].
template <class T>
Tensor<T> dwt2d_ll_batch(const Tensor<T>& x, const WaveletSpec& spec);

/// Gradient of dwt2d_ll_batch (high-subband gradients are zero).
template <class T>
Tensor<T> dwt2d_ll_batch_vjp(const Tensor<T>& upstream, const WaveletSpec& spec,
                             std::size_t height, std::size_t width);

}  // namespace wavecnet
