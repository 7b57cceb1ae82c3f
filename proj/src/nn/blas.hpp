// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

// Row-major GEMM over float and double, C = alpha op(A) op(B) + beta C.

#pragma once

#include <cblas.h>

#include <cstddef>

namespace wavecnet::nn::blas {

inline CBLAS_TRANSPOSE op(bool t) {
  // OpenBLAS's own thread pool would make summation order depend on the
  // machine; callers parallelize over batches instead.
  static const bool pinned = (openblas_set_num_threads(1), true);
  (void)pinned;
  return t ? CblasTrans : CblasNoTrans;
}

inline void gemm(bool ta, bool tb, std::size_t m, std::size_t n, std::size_t k, float alpha, const float* a,
                 std::size_t lda, const float* b, std::size_t ldb, float beta, float* c, std::size_t ldc) {
  cblas_sgemm(CblasRowMajor, op(ta), op(tb), static_cast<int>(m), static_cast<int>(n), static_cast<int>(k), alpha,
              a, static_cast<int>(lda), b, static_cast<int>(ldb), beta, c, static_cast<int>(ldc));
}

inline void gemm(bool ta, bool tb, std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a,
                 std::size_t lda, const double* b, std::size_t ldb, double beta, double* c, std::size_t ldc) {
  cblas_dgemm(CblasRowMajor, op(ta), op(tb), static_cast<int>(m), static_cast<int>(n), static_cast<int>(k), alpha,
              a, static_cast<int>(lda), b, static_cast<int>(ldb), beta, c, static_cast<int>(ldc));
}

}  // namespace wavecnet::nn::blas
