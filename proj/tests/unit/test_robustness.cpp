// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>

#include "doctest.h"
#include "wavecnet/error.hpp"
#include "wavecnet/robustness.hpp"

using namespace wavecnet;

namespace {

Tensor<double> random_images(std::size_t n, std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  Tensor<double> t({n, 1, h, w});
  for (auto& v : t.storage()) v = u(rng);
  return t;
}

std::uint64_t fnv(const Tensor<double>& t) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : t.storage()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = (h ^ bits) * 1099511628211ULL;
  }
  return h;
}

struct ConstantModel : Classifier {
  std::vector<std::size_t> predict(const Tensor<float>& images) const override {
    return std::vector<std::size_t>(images.dim(0), 3);
  }
};

// Reads the top-left pixel of a checkerboard; its value tells the parity of
// the applied shift (dh + dw).
struct ParityProbe : Classifier {
  std::vector<std::size_t> predict(const Tensor<float>& images) const override {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < images.dim(0); ++n) out.push_back(images.at(n, 0, 0, 0) > 0.5f ? 1 : 0);
    return out;
  }
};

// Predicts the label stored in the first pixel; corrupted copies flip it.
struct ThresholdModel : Classifier {
  std::vector<std::size_t> predict(const Tensor<float>& images) const override {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < images.dim(0); ++n) out.push_back(images.at(n, 0, 0, 0) > 0.5f ? 1 : 0);
    return out;
  }
};

Tensor<float> checkerboards(std::size_t n, std::size_t size) {
  Tensor<float> t({n, 1, size, size});
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) t.at(k, 0, i, j) = static_cast<float>((i + j) % 2);
  return t;
}

}  // namespace

TEST_CASE("zero sigma leaves images untouched") {
  CorruptOptions opt;
  opt.table.gaussian = {0, 0, 0, 0, 0};
  const auto img = random_images(3, 8, 8, 1);
  for (int s = 1; s <= 5; ++s) CHECK(corrupt(img, NoiseKind::Gaussian, s, 7, opt) == img);
}

TEST_CASE("impulse amount one saturates every pixel") {
  CorruptOptions opt;
  opt.table.impulse = {1, 1, 1, 1, 1};
  const auto out = corrupt(random_images(2, 16, 16, 2), NoiseKind::Impulse, 2, 5, opt);
  std::size_t zeros = 0;
  for (double v : out.storage()) {
    CHECK((v == 0.0 || v == 1.0));
    zeros += v == 0.0;
  }
  CHECK(zeros > 0);
  CHECK(zeros < out.size());
}

TEST_CASE("gaussian severity 3 has the tabulated spread") {
  CorruptOptions opt;
  opt.clip = false;
  const Tensor<double> img({1, 1, 128, 128}, 0.5);
  const auto out = corrupt(img, NoiseKind::Gaussian, 3, 11, opt);
  double mean = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) mean += out[i] - img[i];
  mean /= static_cast<double>(img.size());
  double var = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) var += std::pow(out[i] - img[i] - mean, 2);
  const double sd = std::sqrt(var / static_cast<double>(img.size() - 1));
  CHECK(std::abs(sd - 0.18) < 0.01);
}

TEST_CASE("corrupted images stay in [0,1] when clipped") {
  const auto img = random_images(4, 12, 12, 3);
  for (auto kind : all_noise_kinds())
    for (int s = 1; s <= 5; ++s) {
      const auto out = corrupt(img, kind, s, 9);
      for (double v : out.storage()) CHECK((v >= 0.0 && v <= 1.0));
    }
}

TEST_CASE("shot noise keeps the mean") {
  const Tensor<double> img({1, 1, 100, 100}, 0.5);
  CorruptOptions opt;
  opt.clip = false;
  const auto out = corrupt(img, NoiseKind::Shot, 1, 4, opt);
  double mean = 0.0;
  for (double v : out.storage()) mean += v;
  mean /= static_cast<double>(out.size());
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("corruption is deterministic and seed-dependent") {
  const auto img = random_images(2, 10, 10, 4);
  for (auto kind : all_noise_kinds()) {
    std::set<std::uint64_t> hashes;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto a = corrupt(img, kind, 3, seed);
      CHECK(a == corrupt(img, kind, 3, seed));
      hashes.insert(fnv(a));
    }
    CHECK(hashes.size() == 10);
  }
}

TEST_CASE("thread count does not change corrupted output") {
  const auto img = random_images(9, 8, 8, 5);
  CorruptOptions one, four;
  four.threads = 4;
  for (auto kind : all_noise_kinds()) CHECK(corrupt(img, kind, 4, 3, one) == corrupt(img, kind, 4, 3, four));
}

TEST_CASE("bad severities") {
  const auto img = random_images(1, 4, 4, 6);
  for (int s : {0, 6, -1}) {
    try {
      corrupt(img, NoiseKind::Gaussian, s, 0);
      FAIL("expected BadSeverity");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::BadSeverity);
    }
  }
}

TEST_CASE("severity table JSON") {
  SeverityTable t;
  t.gaussian[2] = 0.2;
  const auto back = SeverityTable::from_json(t.to_json());
  CHECK(back.gaussian == t.gaussian);
  CHECK(back.shot == t.shot);
  CHECK_THROWS_AS(SeverityTable::from_json({{"speckle_noise", {1, 2, 3, 4, 5}}}), Error);
  CHECK_THROWS_AS(SeverityTable::from_json({{"shot_noise", {1, 2, 0, 4, 5}}}), Error);
  CHECK_THROWS_AS(SeverityTable::from_json({{"impulse_noise", {0.1, 0.2}}}), Error);
  CHECK(SeverityTable::from_json(nlohmann::json::object()).impulse == SeverityTable{}.impulse);
}

TEST_CASE("corruption_error examples") {
  const std::array<double, 5> ref{0.2, 0.3, 0.4, 0.5, 0.6};
  CHECK(corruption_error(ref, ref) == 100.0);
  std::array<double, 5> half{};
  for (int i = 0; i < 5; ++i) half[i] = ref[i] / 2;
  CHECK(corruption_error(half, ref) == doctest::Approx(50.0).epsilon(1e-14));
  try {
    corruption_error(ref, std::array<double, 5>{});
    FAIL("expected ZeroReference");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroReference);
  }
  CHECK_THROWS_AS(corruption_error(std::vector<double>{0.1}, ref), Error);
}

TEST_CASE("corruption_error of a model against itself is exactly 100") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.001, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 5> e{};
    for (auto& v : e) v = u(rng);
    REQUIRE(corruption_error(e, e) == 100.0);
  }
}

TEST_CASE("corruption_error ignores joint rescaling") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 0.5), ua(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 5> f{}, r{}, fa{}, ra{};
    const double a = ua(rng);
    for (int i = 0; i < 5; ++i) {
      f[i] = u(rng);
      r[i] = u(rng);
      fa[i] = a * f[i];
      ra[i] = a * r[i];
    }
    CHECK(corruption_error(fa, ra) == doctest::Approx(corruption_error(f, r)).epsilon(1e-12));
  }
}

TEST_CASE("mean_ce examples") {
  const std::map<std::string, double> noise{{"gaussian_noise", 87.15}, {"shot_noise", 88.47}, {"impulse_noise", 91.30}};
  CHECK(std::round(mean_ce(noise, Category::Noise) * 100) / 100 == 88.97);
  const std::map<std::string, double> blur{
      {"defocus_blur", 83.82}, {"glass_blur", 91.43}, {"motion_blur", 86.82}, {"zoom_blur", 88.70}};
  CHECK(std::round(mean_ce(blur, Category::Blur) * 100) / 100 == 87.69);
  for (auto cat : {Category::Noise, Category::Blur, Category::Weather, Category::Digital}) {
    std::map<std::string, double> all;
    for (const auto& m : category_members(cat)) all[m] = 100.0;
    CHECK(mean_ce(all, cat) == 100.0);
  }
}

TEST_CASE("mean_ce is permutation invariant") {
  const std::array<double, 4> values{83.82, 91.43, 86.82, 88.70};
  std::array<std::size_t, 4> perm{0, 1, 2, 3};
  const auto members = category_members(Category::Blur);
  std::map<std::string, double> base;
  for (std::size_t i = 0; i < 4; ++i) base[members[i]] = values[i];
  const double want = mean_ce(base, Category::Blur);
  do {
    std::map<std::string, double> m;
    for (std::size_t i = 0; i < 4; ++i) m[members[i]] = values[perm[i]];
    CHECK(mean_ce(m, Category::Blur) == doctest::Approx(want).epsilon(1e-14));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("mean_ce names missing members") {
  try {
    mean_ce({{"gaussian_noise", 90.0}}, Category::Noise);
    FAIL("expected MissingCorruption");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingCorruption);
    const std::string what = e.what();
    CHECK(what.find("shot_noise") != std::string::npos);
    CHECK(what.find("impulse_noise") != std::string::npos);
  }
}

TEST_CASE("error matrix serialization") {
  ErrorMatrix m;
  m.model = "a";
  m.set("gaussian_noise", {0.1, 0.2, 0.3, 0.4, 0.5});
  m.set("shot_noise", {0.01, 0.02, 1.0 / 3.0, 0.04, 0.05});
  CHECK(ErrorMatrix::from_csv(m.to_csv(), "a") == m);
  CHECK(ErrorMatrix::from_json(m.to_json()) == m);
  CHECK_THROWS_AS(m.set("x", {0.1, 0.2, 1.5, 0.1, 0.1}), Error);
  CHECK_THROWS_AS(ErrorMatrix::from_csv("corruption,s1,s2,s3,s4,s5\nx,0.1,0.2\n"), Error);
  CHECK_THROWS_AS(ErrorMatrix::from_csv("name,a\n"), Error);
  CHECK_THROWS_AS(ErrorMatrix::from_csv("corruption,s1,s2,s3,s4,s5\nx,0.1,0.2,zz,0.1,0.1\n"), Error);
}

TEST_CASE("robustness report") {
  ErrorMatrix f, ref;
  for (const auto& name : category_members(Category::Noise)) {
    f.set(name, {0.1, 0.1, 0.1, 0.1, 0.1});
    ref.set(name, {0.2, 0.2, 0.2, 0.2, 0.2});
  }
  ref.rows.pop_back();
  SUBCASE("CE only where the reference has the row") {
    const auto r = robustness_report(f, ref);
    CHECK(r.ce.size() == 2);
    CHECK(r.mce.empty());
  }
  SUBCASE("full noise category plus external blur") {
    ref.set("impulse_noise", {0.2, 0.2, 0.2, 0.2, 0.2});
    const auto r = robustness_report(
        f, ref, {{"defocus_blur", 83.82}, {"glass_blur", 91.43}, {"motion_blur", 86.82}, {"zoom_blur", 88.70}});
    REQUIRE(r.mce.size() == 2);
    CHECK(r.mce[0].first == Category::Noise);
    CHECK(r.mce[0].second == doctest::Approx(50.0));
    CHECK(r.mce[1].first == Category::Blur);
    CHECK(r.external == std::vector<Category>{Category::Blur});
    CHECK(r.to_csv().find("mce_noise") != std::string::npos);
    CHECK(r.to_json()["mce"]["blur"].get<double>() == doctest::Approx(87.6925));
  }
}

TEST_CASE("noise error matrix feeds every model the same inputs") {
  Tensor<float> images({40, 1, 6, 6});
  std::vector<std::size_t> labels;
  for (std::size_t n = 0; n < 40; ++n) {
    const float v = n % 2 ? 0.95f : 0.05f;
    for (auto& p : images.plane(n, 0)) p = v;
    labels.push_back(n % 2);
  }
  const Dataset data{images, labels};
  const ThresholdModel model;
  const auto a = noise_error_matrix(model, data, all_noise_kinds(), 12, {}, "m");
  const auto b = noise_error_matrix(model, data, all_noise_kinds(), 12, {}, "m");
  CHECK(a == b);
  REQUIRE(a.rows.size() == 3);
  // error grows with severity for Gaussian noise on a one-pixel decision
  CHECK(a.find("gaussian_noise")->errors[4] >= a.find("gaussian_noise")->errors[0]);
  CHECK(a.find("gaussian_noise")->errors[4] > 0.0);
}

TEST_CASE("shift_images reflects at the border") {
  Tensor<double> t({1, 1, 3, 4});
  for (std::size_t i = 0; i < 12; ++i) t[i] = static_cast<double>(i);
  const auto s = shift_images(t, 1, -2);
  // output (i,j) takes source (reflect(i-1), reflect(j+2))
  CHECK(s.at(0, 0, 0, 0) == t.at(0, 0, 1, 2));
  CHECK(s.at(0, 0, 1, 1) == t.at(0, 0, 0, 3));
  CHECK(s.at(0, 0, 2, 3) == t.at(0, 0, 1, 1));
  CHECK(shift_images(t, 0, 0) == t);
  try {
    shift_images(t, 3, 0);
    FAIL("expected ShiftOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ShiftOutOfRange);
  }
}

TEST_CASE("shift_consistency examples") {
  const auto images = checkerboards(5, 28);
  SUBCASE("constant model") {
    CHECK(shift_consistency(ConstantModel{}, images, {}) == 100.0);
  }
  SUBCASE("parity probe with unequal parities") {
    ShiftTrialConfig cfg;
    cfg.explicit_pairs = {{0, 0, 1, 0}, {2, 3, -1, -1}, {-4, 1, 5, 5}};
    CHECK(shift_consistency(ParityProbe{}, images, cfg) == 0.0);
  }
  SUBCASE("identical shifts agree for any model") {
    ShiftTrialConfig cfg;
    cfg.explicit_pairs = {{1, 2, 1, 2}, {-3, 5, -3, 5}, {0, 7, 0, 7}};
    CHECK(shift_consistency(ParityProbe{}, images, cfg) == 100.0);
  }
  SUBCASE("random pairs are reproducible") {
    ShiftTrialConfig cfg;
    cfg.seed = 4;
    const double a = shift_consistency(ParityProbe{}, images, cfg);
    CHECK(a == shift_consistency(ParityProbe{}, images, cfg));
    CHECK(a > 0.0);
    CHECK(a < 100.0);
  }
  SUBCASE("invalid configs") {
    ShiftTrialConfig cfg;
    cfg.range = 0;
    CHECK_THROWS_AS(shift_consistency(ConstantModel{}, images, cfg), Error);
    cfg.range = 28;
    CHECK_THROWS_AS(shift_consistency(ConstantModel{}, images, cfg), Error);
    cfg.range = 8;
    cfg.pairs = 0;
    CHECK_THROWS_AS(shift_consistency(ConstantModel{}, images, cfg), Error);
  }
}
