// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

// Test-only reference implementations. Nothing here calls into the banded
// kernels: matrices are built from the placement rule directly and every
// product is a plain dense triple loop.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

struct Dense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Dense() = default;
  Dense(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

/// floor(n/2) x n truncated filter matrix: row k, column 2k + j holds f[j].
inline Dense placement_matrix(const std::vector<double>& f, std::size_t n) {
  Dense m(n / 2, n);
  for (std::size_t k = 0; k < n / 2; ++k) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (2 * k + j < n) m(k, 2 * k + j) = f[j];
    }
  }
  return m;
}

inline Dense transpose(const Dense& a) {
  Dense t(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) t(c, r) = a(r, c);
  return t;
}

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline Dense add(const Dense& a, const Dense& b) {
  Dense out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
  return out;
}

inline std::vector<double> matvec(const Dense& a, const std::vector<double>& x) {
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) y[i] += a(i, k) * x[k];
  return y;
}

/// Filter, then keep every second output: y[k] = Σ_j f[j] x[2k + j], with x
/// read as zero past its end.
inline std::vector<double> correlate_downsample(const std::vector<double>& f,
                                                const std::vector<double>& x) {
  std::vector<double> y(x.size() / 2, 0.0);
  for (std::size_t k = 0; k < y.size(); ++k)
    for (std::size_t j = 0; j < f.size(); ++j)
      if (2 * k + j < x.size()) y[k] += f[j] * x[2 * k + j];
  return y;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline Dense random_dense(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Dense m(r, c);
  m.v = random_vector(r * c, rng);
  return m;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Central-difference directional derivative of f at x along direction d.
inline std::vector<double> directional_derivative(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    const std::vector<double>& x, const std::vector<double>& d, double step) {
  std::vector<double> xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += step * d[i];
    xm[i] -= step * d[i];
  }
  const auto fp = f(xp), fm = f(xm);
  std::vector<double> out(fp.size());
  for (std::size_t i = 0; i < fp.size(); ++i) out[i] = (fp[i] - fm[i]) / (2.0 * step);
  return out;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle
