// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include <array>
#include <cstdint>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wavecnet/complexity.hpp"
#include "wavecnet/error.hpp"
#include "wavecnet/filterbank.hpp"

using namespace wavecnet;
using namespace wavecnet::nn;

namespace {

// Dense product that tallies every scalar multiplication and addition it
// performs. The first term of each dot product needs no addition.
struct CountingProduct {
  std::uint64_t ops = 0;

  oracle::Dense operator()(const oracle::Dense& a, const oracle::Dense& b) {
    oracle::Dense out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < b.cols; ++j) {
        double s = a(i, 0) * b(0, j);
        ++ops;
        for (std::size_t k = 1; k < a.cols; ++k) {
          s += a(i, k) * b(k, j);
          ops += 2;
        }
        out(i, j) = s;
      }
    return out;
  }
};

// Analysis of c planes: each subband is (A X) B^T with dense A, B.
std::uint64_t brute_force_dwt(std::size_t m, std::size_t n, std::size_t c) {
  const auto& w = get_wavelet("db2");
  const auto lm = oracle::placement_matrix(w.analysis_low, m), hm = oracle::placement_matrix(w.analysis_high, m);
  const auto ln = oracle::placement_matrix(w.analysis_low, n), hn = oracle::placement_matrix(w.analysis_high, n);
  std::mt19937_64 rng(1);
  CountingProduct mul;
  for (std::size_t ch = 0; ch < c; ++ch) {
    const auto x = oracle::random_dense(m, n, rng);
    for (const auto* rows : {&lm, &hm})
      for (const auto* cols : {&ln, &hn}) mul(mul(*rows, x), oracle::transpose(*cols));
  }
  return mul.ops;
}

// Synthesis: each subband contributes A^T Y B, and the four are summed.
std::uint64_t brute_force_idwt(std::size_t m, std::size_t n, std::size_t c) {
  const auto& w = get_wavelet("db2");
  const auto lm = oracle::placement_matrix(w.synthesis_low, m), hm = oracle::placement_matrix(w.synthesis_high, m);
  const auto ln = oracle::placement_matrix(w.synthesis_low, n), hn = oracle::placement_matrix(w.synthesis_high, n);
  std::mt19937_64 rng(2);
  CountingProduct mul;
  std::uint64_t adds = 0;
  for (std::size_t ch = 0; ch < c; ++ch) {
    oracle::Dense sum;
    bool first = true;
    for (const auto* rows : {&lm, &hm})
      for (const auto* cols : {&ln, &hn}) {
        const auto y = oracle::random_dense(m / 2, n / 2, rng);
        const auto part = mul(mul(oracle::transpose(*rows), y), *cols);
        if (first) {
          sum = part;
          first = false;
        } else {
          sum = oracle::add(sum, part);
          adds += sum.v.size();
        }
      }
  }
  return mul.ops + adds;
}

}  // namespace

TEST_CASE("dwt2d_madds examples") {
  CHECK(dwt2d_madds(2, 2, 1) == 36);
  CHECK(dwt2d_madds(224, 224, 3) == 201858048ULL);
  for (std::int64_t m : {2, 6, 28})
    for (std::int64_t n : {4, 10}) CHECK(dwt2d_madds(m, n, 2) == 2 * dwt2d_madds(m, n, 1));
}

TEST_CASE("idwt2d_madds examples") {
  CHECK(idwt2d_madds(2, 2, 1) == 39);
  CHECK(idwt2d_madds(224, 224, 3) == 201858051ULL);
  for (std::int64_t m : {2, 8, 32}) CHECK(idwt2d_madds(m, m, 3) - 3 == dwt2d_madds(m, m, 3));
}

TEST_CASE("non-positive sizes") {
  for (auto args : {std::array<std::int64_t, 3>{0, 2, 1}, {2, 0, 1}, {2, 2, 0}, {-2, 2, 1}}) {
    try {
      dwt2d_madds(args[0], args[1], args[2]);
      FAIL("expected NonPositive");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonPositive);
    }
    CHECK_THROWS_AS(idwt2d_madds(args[0], args[1], args[2]), Error);
  }
}

TEST_CASE("formulas agree with brute-force counting of the dense products") {
  for (std::size_t m : {2, 4, 6, 8})
    for (std::size_t n : {2, 4, 6, 8})
      for (std::size_t c : {1, 2}) {
        INFO(m << "x" << n << "x" << c);
        const auto sm = static_cast<std::int64_t>(m), sn = static_cast<std::int64_t>(n),
                   sc = static_cast<std::int64_t>(c);
        CHECK(dwt2d_madds(sm, sn, sc) == brute_force_dwt(m, n, c));
        // The trailing constant of the inverse formula is not a product count.
        CHECK(idwt2d_madds(sm, sn, sc) - 3 == brute_force_idwt(m, n, c));
      }
}

TEST_CASE("monotone in every argument") {
  for (std::int64_t v = 2; v < 40; v += 2) {
    CHECK(dwt2d_madds(v + 2, 8, 1) > dwt2d_madds(v, 8, 1));
    CHECK(dwt2d_madds(8, v + 2, 1) > dwt2d_madds(8, v, 1));
    CHECK(dwt2d_madds(8, 8, v + 1) > dwt2d_madds(8, 8, v));
  }
}

TEST_CASE("model_madds") {
  SUBCASE("no wavelet layers") {
    const auto r = model_madds(wavecnet_mini(DownsampleMode::max_pool()), {1, 28, 28});
    CHECK(r.wavelet == 0);
    CHECK(r.ratio == 0.0);
    CHECK(r.total == r.non_wavelet);
    // conv1 32x32x16 outputs x 9 taps, conv2 16x16x32 x 144, conv3 8x8x64 x 288, dense 1024 x 10
    CHECK(r.total == 32 * 32 * 16 * 9 + 16 * 16 * 32 * 144 + 8 * 8 * 64 * 288 + 1024 * 10);
  }
  SUBCASE("a lone wavelet layer") {
    ModelConfig cfg;
    cfg.input = {1, 2, 2};
    cfg.classes = 1;
    cfg.layers = {LayerSpec::downsample(DownsampleMode::dwt_ll("haar")), LayerSpec::flatten()};
    const auto r = model_madds(cfg, {1, 2, 2});
    CHECK(r.ratio == 100.0);
    CHECK(r.wavelet == 36);
    CHECK(r.wavelet_ll_quarter == 9);
  }
  SUBCASE("wavecnet-mini sums the traced down-sampling inputs") {
    const auto cfg = wavecnet_mini(DownsampleMode::dwt_ll("haar"));
    const auto r = model_madds(cfg, {1, 1, 28, 28});
    const auto shapes = trace_shapes(cfg);
    const auto specs = expand_layers(cfg);
    std::uint64_t want = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (specs[i].kind == LayerKind::Downsample) {
        const auto& s = shapes[i];
        want += dwt2d_madds(static_cast<std::int64_t>(s[1]), static_cast<std::int64_t>(s[2]),
                            static_cast<std::int64_t>(s[0]));
      }
    }
    CHECK(want == dwt2d_madds(32, 32, 16) + dwt2d_madds(16, 16, 32) + dwt2d_madds(8, 8, 64));
    CHECK(r.wavelet == want);
    CHECK(r.wavelet + r.non_wavelet == r.total);
    CHECK(r.ratio == doctest::Approx(100.0 * want / r.total));
    const auto pooled = model_madds(wavecnet_mini(DownsampleMode::max_pool()), {1, 28, 28});
    CHECK(r.non_wavelet == pooled.non_wavelet);
    CHECK(r.wavelet_banded > 0);
    CHECK(r.wavelet_banded < r.wavelet);
  }
  SUBCASE("batch scales every count") {
    const auto cfg = wavecnet_mini(DownsampleMode::dwt_avg("db2"));
    const auto one = model_madds(cfg, {1, 28, 28});
    const auto four = model_madds(cfg, {4, 1, 28, 28});
    CHECK(four.total == 4 * one.total);
    CHECK(four.ratio == doctest::Approx(one.ratio));
    CHECK(four.to_json()["ratio"].get<double>() == doctest::Approx(one.ratio));
  }
  SUBCASE("bad shapes") {
    const auto cfg = wavecnet_mini(DownsampleMode::dwt_ll("haar"));
    CHECK_THROWS_AS(model_madds(cfg, {28, 28}), Error);
    try {
      model_madds(cfg, {1, 30, 30});
      FAIL("expected InvalidConfig");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidConfig);
    }
  }
}

TEST_CASE("banded counts follow the stored band widths") {
  // haar: one tap pair per row; ll-only needs m*(n/2)*2 + (n/2)*(m/2)*2
  CHECK(banded_dwt2d_madds("haar", 4, 6, true) == 4 * 6 + 3 * 4);
  CHECK(banded_dwt2d_madds("haar", 4, 6, false) == 4 * 12 + 2 * 3 * 8);
}
