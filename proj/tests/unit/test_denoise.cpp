// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wavecnet/denoise.hpp"
#include "wavecnet/error.hpp"
#include "wavecnet/synthetic.hpp"
#include "wavecnet/transform.hpp"

using namespace wavecnet;

namespace {

// Sign-magnitude form of the shrinkage rule, written independently of the
// library's three-branch version.
double shrink_oracle(double x, double lambda) {
  const double m = std::max(std::abs(x) - lambda, 0.0);
  return m == 0.0 ? 0.0 : std::copysign(m, x);
}

double mse(const Matrix<double>& a, const Matrix<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
  return s / static_cast<double>(a.data.size());
}

}  // namespace

TEST_CASE("soft_shrink examples") {
  CHECK(soft_shrink(0.5, 0.1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(soft_shrink(-0.05, 0.1) == 0.0);
  CHECK(soft_shrink(-0.3, 0.1) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(soft_shrink(0.1, 0.1) == 0.0);
  CHECK(soft_shrink(-0.1, 0.1) == 0.0);
}

TEST_CASE("soft_shrink matches the piecewise rule on a 1000-point grid") {
  for (double lambda : {0.0, 0.05, 0.1, 0.5}) {
    for (int i = 0; i < 1000; ++i) {
      const double x = -1.0 + 2.0 * i / 999.0;
      CHECK(soft_shrink(x, lambda) == shrink_oracle(x, lambda));
    }
  }
}

TEST_CASE("soft_shrink properties") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-5, 5), ul(0, 2);
  for (int i = 0; i < 2000; ++i) {
    const double x = ux(rng), l = ul(rng);
    CHECK(std::abs(soft_shrink(x, l)) <= std::abs(x));
    CHECK(soft_shrink(-x, l) == -soft_shrink(x, l));
  }
}

TEST_CASE("negative threshold is rejected") {
  try {
    soft_shrink(1.0, -0.1);
    FAIL("expected NegativeLambda");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NegativeLambda);
  }
  DenoiseConfig cfg;
  cfg.lambda = -1;
  CHECK_THROWS_AS(denoise_image(Matrix<double>(4, 4, 0.5), cfg), Error);
}

TEST_CASE("lambda zero reduces to the transform round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (const char* w : {"haar", "db3", "ch3.3"}) {
    Matrix<double> img(16, 12);
    for (auto& v : img.data) v = u(rng);
    DenoiseConfig cfg{w, 0.0};
    const auto out = denoise_image(img, cfg);
    const auto& spec = get_wavelet(w);
    const auto plain = idwt2d(dwt2d(img, spec), spec);
    CHECK(out == plain);
    if (std::string(w) == "haar") {
      for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(std::abs(out.data[i] - img.data[i]) < 1e-12);
    }
  }
}

TEST_CASE("constant image is unchanged") {
  for (double c : {0.0, 0.3, 1.0}) {
    const Matrix<double> img(8, 10, c);
    const auto out = denoise_image(img, DenoiseConfig{"haar", 0.1});
    for (double v : out.data) CHECK(v == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("shrunk subbands never grow") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 0.2);
  Matrix<double> img(32, 32);
  for (auto& v : img.data) v = 0.5 + n(rng);
  const auto& spec = get_wavelet("haar");
  const auto before = dwt2d(img, spec);
  const auto after = dwt2d(denoise_image(img, DenoiseConfig{"haar", 0.1}), spec);
  auto inf_norm = [](const Matrix<double>& m) {
    double s = 0.0;
    for (double v : m.data) s = std::max(s, std::abs(v));
    return s;
  };
  CHECK(inf_norm(after.lh) <= inf_norm(before.lh) + 1e-12);
  CHECK(inf_norm(after.hl) <= inf_norm(before.hl) + 1e-12);
  CHECK(inf_norm(after.hh) <= inf_norm(before.hh) + 1e-12);
  for (std::size_t i = 0; i < before.ll.data.size(); ++i) CHECK(after.ll.data[i] == doctest::Approx(before.ll.data[i]));
}

TEST_CASE("denoising lowers the error of a noisy smooth image") {
  const auto clean = smooth_test_image(64, 64, 1);
  double noisy_total = 0.0, denoised_total = 0.0;
  int wins = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::mt19937_64 rng(100 + trial);
    std::normal_distribution<double> n(0.0, 0.1);
    Matrix<double> noisy = clean;
    for (auto& v : noisy.data) v += n(rng);
    const auto out = denoise_image(noisy, DenoiseConfig{"haar", 0.1});
    const double a = mse(noisy, clean), b = mse(out, clean);
    noisy_total += a;
    denoised_total += b;
    wins += b < a;
  }
  CHECK(denoised_total < noisy_total);
  CHECK(wins == 10);
}

TEST_CASE("tensor denoising works plane by plane") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  Tensor<double> t({2, 3, 8, 8});
  for (auto& v : t.storage()) v = u(rng);
  const DenoiseConfig cfg{"db2", 0.1};
  const auto out = denoise_image(t, cfg);
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t c = 0; c < 3; ++c) {
      const auto p = t.plane(n, c);
      const auto single = denoise_image(Matrix<double>(8, 8, std::vector<double>(p.begin(), p.end())), cfg);
      const auto got = out.plane(n, c);
      for (std::size_t i = 0; i < 64; ++i) CHECK(got[i] == single.data[i]);
    }
  }
  CHECK_THROWS_AS(denoise_image(Tensor<double>({5}), cfg), Error);
}
