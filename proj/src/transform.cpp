// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/transform.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>

#include "wavecnet/error.hpp"

namespace wavecnet {

BandedMatrix::BandedMatrix(std::span<const double> filter, std::size_t n)
    : rows_(n / 2), cols_(n) {
  first_.reserve(rows_);
  offset_.reserve(rows_ + 1);
  offset_.push_back(0);
  for (std::size_t k = 0; k < rows_; ++k) {
    const std::size_t start = 2 * k;
    const std::size_t count = std::min(filter.size(), n - start);
    first_.push_back(start);
    values_.insert(values_.end(), filter.begin(), filter.begin() + static_cast<long>(count));
    offset_.push_back(values_.size());
  }
}

double BandedMatrix::at(std::size_t r, std::size_t c) const {
  if (c < first_[r]) return 0.0;
  const auto vals = row_values(r);
  const std::size_t j = c - first_[r];
  return j < vals.size() ? vals[j] : 0.0;
}

std::vector<double> BandedMatrix::dense() const {
  std::vector<double> out(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto vals = row_values(r);
    for (std::size_t j = 0; j < vals.size(); ++j) out[r * cols_ + first_[r] + j] = vals[j];
  }
  return out;
}

AnalysisOperator make_operator(const WaveletSpec& spec, std::size_t n) {
  if (n < 2) throw Error(Errc::TooShort, "signal length " + std::to_string(n) + " < 2");
  AnalysisOperator op;
  op.wavelet = spec.name;
  op.signal_length = n;
  op.L = BandedMatrix(spec.analysis_low, n);
  op.H = BandedMatrix(spec.analysis_high, n);
  op.L_syn = BandedMatrix(spec.synthesis_low, n);
  op.H_syn = BandedMatrix(spec.synthesis_high, n);
  return op;
}

namespace {

struct OperatorCache {
  std::shared_mutex mutex;
  std::map<std::pair<std::string, std::size_t>, std::shared_ptr<const AnalysisOperator>> entries;
};

OperatorCache& cache() {
  static OperatorCache instance;
  return instance;
}

bool is_registry_spec(const WaveletSpec& spec) {
  try {
    return &get_wavelet(spec.name) == &spec;
  } catch (const Error&) {
    return false;
  }
}

void require_length(std::size_t n, const char* what) {
  if (n < 2) throw Error(Errc::TooShort, std::string(what) + " length " + std::to_string(n) + " < 2");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(Errc::ShapeMismatch, message);
}

// Row operator acts on the row index (left multiply), column operator on the
// column index (right multiply by its transpose).
template <class T>
void analyze_plane(const T* x, std::size_t rows, std::size_t cols, const BandedMatrix& row_low,
                   const BandedMatrix& row_high, const BandedMatrix& col_low,
                   const BandedMatrix& col_high, T* ll, T* lh, T* hl, T* hh) {
  const std::size_t half_cols = cols / 2;
  std::vector<T> tmp_low(rows * half_cols);
  std::vector<T> tmp_high(rows * half_cols);
  for (std::size_t r = 0; r < rows; ++r) {
    col_low.multiply(x + r * cols, tmp_low.data() + r * half_cols);
    col_high.multiply(x + r * cols, tmp_high.data() + r * half_cols);
  }
  row_low.multiply_rows(tmp_low.data(), half_cols, ll);
  row_high.multiply_rows(tmp_low.data(), half_cols, lh);
  row_low.multiply_rows(tmp_high.data(), half_cols, hl);
  row_high.multiply_rows(tmp_high.data(), half_cols, hh);
}

// Transpose of analyze_plane for the given matrices; `out` is overwritten.
template <class T>
void synthesize_plane(const T* ll, const T* lh, const T* hl, const T* hh, std::size_t rows,
                      std::size_t cols, const BandedMatrix& row_low, const BandedMatrix& row_high,
                      const BandedMatrix& col_low, const BandedMatrix& col_high, T* out) {
  const std::size_t half_cols = cols / 2;
  std::vector<T> tmp_low(rows * half_cols, T{});
  std::vector<T> tmp_high(rows * half_cols, T{});
  if (ll) row_low.multiply_rows_transposed_add(ll, half_cols, tmp_low.data());
  if (lh) row_high.multiply_rows_transposed_add(lh, half_cols, tmp_low.data());
  if (hl) row_low.multiply_rows_transposed_add(hl, half_cols, tmp_high.data());
  if (hh) row_high.multiply_rows_transposed_add(hh, half_cols, tmp_high.data());
  std::fill(out, out + rows * cols, T{});
  for (std::size_t r = 0; r < rows; ++r) {
    col_low.multiply_transposed_add(tmp_low.data() + r * half_cols, out + r * cols);
    if (hl || hh) col_high.multiply_transposed_add(tmp_high.data() + r * half_cols, out + r * cols);
  }
}

template <class T>
Decomposition2D<T> empty_decomposition(std::size_t rows, std::size_t cols) {
  Decomposition2D<T> d;
  d.ll = Matrix<T>(rows / 2, cols / 2);
  d.lh = d.ll;
  d.hl = d.ll;
  d.hh = d.ll;
  d.original_shape = {rows, cols};
  return d;
}

template <class T>
void check_decomposition(const Decomposition2D<T>& d) {
  const auto [rows, cols] = d.original_shape;
  require_length(rows, "row");
  require_length(cols, "column");
  for (const Matrix<T>* band : {&d.ll, &d.lh, &d.hl, &d.hh}) {
    require(band->rows == rows / 2 && band->cols == cols / 2,
            "subband shape " + std::to_string(band->rows) + "x" + std::to_string(band->cols) +
                " inconsistent with original shape " + std::to_string(rows) + "x" +
                std::to_string(cols));
  }
}

template <class T>
void check_rank4(const Tensor<T>& x) {
  require(x.rank() == 4, "expected a rank-4 [N,C,H,W] tensor, got " + shape_string(x.shape()));
  require_length(x.dim(2), "height");
  require_length(x.dim(3), "width");
}

}  // namespace

std::shared_ptr<const AnalysisOperator> build_operator(const WaveletSpec& spec, std::size_t n) {
  if (!is_registry_spec(spec)) return std::make_shared<const AnalysisOperator>(make_operator(spec, n));
  auto& c = cache();
  const auto key = std::make_pair(spec.name, n);
  {
    std::shared_lock lock(c.mutex);
    if (auto it = c.entries.find(key); it != c.entries.end()) return it->second;
  }
  auto built = std::make_shared<const AnalysisOperator>(make_operator(spec, n));
  std::unique_lock lock(c.mutex);
  auto [it, inserted] = c.entries.emplace(key, std::move(built));
  return it->second;
}

void clear_operator_cache() {
  auto& c = cache();
  std::unique_lock lock(c.mutex);
  c.entries.clear();
}

std::size_t operator_cache_size() {
  auto& c = cache();
  std::shared_lock lock(c.mutex);
  return c.entries.size();
}

template <class T>
Subbands1D<T> dwt1d(std::span<const T> signal, const WaveletSpec& spec) {
  require_length(signal.size(), "signal");
  const auto op = build_operator(spec, signal.size());
  Subbands1D<T> out{std::vector<T>(signal.size() / 2), std::vector<T>(signal.size() / 2)};
  op->L.multiply(signal.data(), out.low.data());
  op->H.multiply(signal.data(), out.high.data());
  return out;
}

template <class T>
std::vector<T> idwt1d(std::span<const T> low, std::span<const T> high, const WaveletSpec& spec,
                      std::size_t n) {
  require_length(n, "signal");
  require(low.size() == n / 2 && high.size() == n / 2,
          "subband lengths must both equal floor(n/2) = " + std::to_string(n / 2));
  const auto op = build_operator(spec, n);
  std::vector<T> out(n, T{});
  op->L_syn.multiply_transposed_add(low.data(), out.data());
  op->H_syn.multiply_transposed_add(high.data(), out.data());
  return out;
}

template <class T>
std::vector<T> dwt1d_vjp(std::span<const T> upstream_low, std::span<const T> upstream_high,
                         const WaveletSpec& spec, std::size_t n) {
  require_length(n, "signal");
  require(upstream_low.size() == n / 2 && upstream_high.size() == n / 2,
          "upstream lengths must both equal floor(n/2) = " + std::to_string(n / 2));
  const auto op = build_operator(spec, n);
  std::vector<T> out(n, T{});
  op->L.multiply_transposed_add(upstream_low.data(), out.data());
  op->H.multiply_transposed_add(upstream_high.data(), out.data());
  return out;
}

template <class T>
Subbands1D<T> idwt1d_vjp(std::span<const T> upstream, const WaveletSpec& spec) {
  require_length(upstream.size(), "upstream");
  const auto op = build_operator(spec, upstream.size());
  Subbands1D<T> out{std::vector<T>(upstream.size() / 2), std::vector<T>(upstream.size() / 2)};
  op->L_syn.multiply(upstream.data(), out.low.data());
  op->H_syn.multiply(upstream.data(), out.high.data());
  return out;
}

template <class T>
Decomposition2D<T> dwt2d(const Matrix<T>& x, const WaveletSpec& spec) {
  require_length(x.rows, "row");
  require_length(x.cols, "column");
  const auto rop = build_operator(spec, x.rows);
  const auto cop = build_operator(spec, x.cols);
  auto d = empty_decomposition<T>(x.rows, x.cols);
  analyze_plane(x.data.data(), x.rows, x.cols, rop->L, rop->H, cop->L, cop->H, d.ll.data.data(),
                d.lh.data.data(), d.hl.data.data(), d.hh.data.data());
  return d;
}

template <class T>
Matrix<T> idwt2d(const Decomposition2D<T>& d, const WaveletSpec& spec) {
  check_decomposition(d);
  const auto [rows, cols] = d.original_shape;
  const auto rop = build_operator(spec, rows);
  const auto cop = build_operator(spec, cols);
  Matrix<T> out(rows, cols);
  synthesize_plane(d.ll.data.data(), d.lh.data.data(), d.hl.data.data(), d.hh.data.data(), rows,
                   cols, rop->L_syn, rop->H_syn, cop->L_syn, cop->H_syn, out.data.data());
  return out;
}

template <class T>
Matrix<T> dwt2d_vjp(const Decomposition2D<T>& upstream, const WaveletSpec& spec) {
  check_decomposition(upstream);
  const auto [rows, cols] = upstream.original_shape;
  const auto rop = build_operator(spec, rows);
  const auto cop = build_operator(spec, cols);
  Matrix<T> out(rows, cols);
  synthesize_plane(upstream.ll.data.data(), upstream.lh.data.data(), upstream.hl.data.data(),
                   upstream.hh.data.data(), rows, cols, rop->L, rop->H, cop->L, cop->H,
                   out.data.data());
  return out;
}

template <class T>
Decomposition2D<T> idwt2d_vjp(const Matrix<T>& upstream, const WaveletSpec& spec) {
  require_length(upstream.rows, "row");
  require_length(upstream.cols, "column");
  const auto rop = build_operator(spec, upstream.rows);
  const auto cop = build_operator(spec, upstream.cols);
  auto d = empty_decomposition<T>(upstream.rows, upstream.cols);
  analyze_plane(upstream.data.data(), upstream.rows, upstream.cols, rop->L_syn, rop->H_syn,
                cop->L_syn, cop->H_syn, d.ll.data.data(), d.lh.data.data(), d.hl.data.data(),
                d.hh.data.data());
  return d;
}

template <class T>
BatchSubbands<T> dwt2d_batch(const Tensor<T>& x, const WaveletSpec& spec) {
  check_rank4(x);
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const auto rop = build_operator(spec, h);
  const auto cop = build_operator(spec, w);
  const Shape out_shape{n, c, h / 2, w / 2};
  BatchSubbands<T> out{Tensor<T>(out_shape), Tensor<T>(out_shape), Tensor<T>(out_shape),
                       Tensor<T>(out_shape)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      analyze_plane(x.plane(i, ch).data(), h, w, rop->L, rop->H, cop->L, cop->H,
                    out.ll.plane(i, ch).data(), out.lh.plane(i, ch).data(),
                    out.hl.plane(i, ch).data(), out.hh.plane(i, ch).data());
    }
  }
  return out;
}

namespace {

template <class T>
void check_bands(const BatchSubbands<T>& b, std::size_t height, std::size_t width) {
  require_length(height, "height");
  require_length(width, "width");
  for (const Tensor<T>* t : {&b.ll, &b.lh, &b.hl, &b.hh}) {
    require(t->rank() == 4 && t->shape() == b.ll.shape(), "subband tensors must share one rank-4 shape");
  }
  require(b.ll.dim(2) == height / 2 && b.ll.dim(3) == width / 2,
          "subband shape " + shape_string(b.ll.shape()) + " inconsistent with target " +
              std::to_string(height) + "x" + std::to_string(width));
}

template <class T>
Tensor<T> synthesize_batch(const BatchSubbands<T>& b, std::size_t height, std::size_t width,
                           const AnalysisOperator& rop, const AnalysisOperator& cop, bool synthesis) {
  const std::size_t n = b.ll.dim(0), c = b.ll.dim(1);
  Tensor<T> out(Shape{n, c, height, width});
  const auto& rl = synthesis ? rop.L_syn : rop.L;
  const auto& rh = synthesis ? rop.H_syn : rop.H;
  const auto& cl = synthesis ? cop.L_syn : cop.L;
  const auto& chh = synthesis ? cop.H_syn : cop.H;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      synthesize_plane(b.ll.plane(i, ch).data(), b.lh.plane(i, ch).data(),
                       b.hl.plane(i, ch).data(), b.hh.plane(i, ch).data(), height, width, rl, rh,
                       cl, chh, out.plane(i, ch).data());
    }
  }
  return out;
}

}  // namespace

template <class T>
Tensor<T> idwt2d_batch(const BatchSubbands<T>& bands, const WaveletSpec& spec, std::size_t height,
                       std::size_t width) {
  check_bands(bands, height, width);
  return synthesize_batch(bands, height, width, *build_operator(spec, height),
                          *build_operator(spec, width), true);
}

template <class T>
Tensor<T> dwt2d_batch_vjp(const BatchSubbands<T>& upstream, const WaveletSpec& spec,
                          std::size_t height, std::size_t width) {
  check_bands(upstream, height, width);
  return synthesize_batch(upstream, height, width, *build_operator(spec, height),
                          *build_operator(spec, width), false);
}

template <class T>
Tensor<T> dwt2d_ll_batch(const Tensor<T>& x, const WaveletSpec& spec) {
  check_rank4(x);
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const auto rop = build_operator(spec, h);
  const auto cop = build_operator(spec, w);
  Tensor<T> out(Shape{n, c, h / 2, w / 2});
  std::vector<T> tmp(h * (w / 2));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T* src = x.plane(i, ch).data();
      for (std::size_t r = 0; r < h; ++r) cop->L.multiply(src + r * w, tmp.data() + r * (w / 2));
      rop->L.multiply_rows(tmp.data(), w / 2, out.plane(i, ch).data());
    }
  }
  return out;
}

template <class T>
Tensor<T> dwt2d_ll_batch_vjp(const Tensor<T>& upstream, const WaveletSpec& spec,
                             std::size_t height, std::size_t width) {
  require(upstream.rank() == 4, "expected a rank-4 upstream gradient");
  require_length(height, "height");
  require_length(width, "width");
  require(upstream.dim(2) == height / 2 && upstream.dim(3) == width / 2,
          "upstream shape " + shape_string(upstream.shape()) + " inconsistent with target");
  const std::size_t n = upstream.dim(0), c = upstream.dim(1);
  const auto rop = build_operator(spec, height);
  const auto cop = build_operator(spec, width);
  Tensor<T> out(Shape{n, c, height, width});
  std::vector<T> tmp(height * (width / 2));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      std::fill(tmp.begin(), tmp.end(), T{});
      rop->L.multiply_rows_transposed_add(upstream.plane(i, ch).data(), width / 2, tmp.data());
      T* dst = out.plane(i, ch).data();
      for (std::size_t r = 0; r < height; ++r) {
        cop->L.multiply_transposed_add(tmp.data() + r * (width / 2), dst + r * width);
      }
    }
  }
  return out;
}

#define WAVECNET_INSTANTIATE(T)                                                                   \
  template Subbands1D<T> dwt1d<T>(std::span<const T>, const WaveletSpec&);                        \
  template std::vector<T> idwt1d<T>(std::span<const T>, std::span<const T>, const WaveletSpec&,   \
                                    std::size_t);                                                 \
  template std::vector<T> dwt1d_vjp<T>(std::span<const T>, std::span<const T>,                    \
                                       const WaveletSpec&, std::size_t);                          \
  template Subbands1D<T> idwt1d_vjp<T>(std::span<const T>, const WaveletSpec&);                   \
  template Decomposition2D<T> dwt2d<T>(const Matrix<T>&, const WaveletSpec&);                     \
  template Matrix<T> idwt2d<T>(const Decomposition2D<T>&, const WaveletSpec&);                    \
  template Matrix<T> dwt2d_vjp<T>(const Decomposition2D<T>&, const WaveletSpec&);                 \
  template Decomposition2D<T> idwt2d_vjp<T>(const Matrix<T>&, const WaveletSpec&);                \
  template BatchSubbands<T> dwt2d_batch<T>(const Tensor<T>&, const WaveletSpec&);                 \
  template Tensor<T> idwt2d_batch<T>(const BatchSubbands<T>&, const WaveletSpec&, std::size_t,    \
                                     std::size_t);                                                \
  template Tensor<T> dwt2d_batch_vjp<T>(const BatchSubbands<T>&, const WaveletSpec&, std::size_t, \
                                        std::size_t);                                             \
  template Tensor<T> dwt2d_ll_batch<T>(const Tensor<T>&, const WaveletSpec&);                     \
  template Tensor<T> dwt2d_ll_batch_vjp<T>(const Tensor<T>&, const WaveletSpec&, std::size_t,     \
                                           std::size_t);

WAVECNET_INSTANTIATE(float)
WAVECNET_INSTANTIATE(double)

#undef WAVECNET_INSTANTIATE

}  // namespace wavecnet
