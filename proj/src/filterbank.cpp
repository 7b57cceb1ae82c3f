// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/filterbank.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "wavecnet/error.hpp"

namespace wavecnet {
namespace {

const double kSqrt2 = std::sqrt(2.0);

constexpr std::array<std::string_view, 10> kNames = {
    "haar", "db2", "db3", "db4", "db5", "db6", "ch2.2", "ch3.3", "ch4.4", "ch5.5"};

// Daubechies low-pass filters for p = 3..6; the table factor is 1 for these.
const std::vector<double> kDb3 = {
    0.332670552950, 0.806891509311, 0.459877502118,
    -0.135011020010, -0.085441273882, 0.035226291886};
const std::vector<double> kDb4 = {
    0.230377813309, 0.714846570553, 0.630880767930, -0.027983769417,
    -0.187034811719, 0.030841381836, 0.032883011667, -0.010597401785};
const std::vector<double> kDb5 = {
    0.160102397974, 0.603829269797, 0.724308528438, 0.138428145901,
    -0.242294887066, -0.032244869585, 0.077571493840, -0.006241490213,
    -0.012580751999, 0.003335725285};
const std::vector<double> kDb6 = {
    0.111540743350, 0.494623890398, 0.751133908021, 0.315250351709,
    -0.226264693965, -0.129766867567, 0.097501605587, 0.027522865530,
    -0.031582039317, 0.000553842201, 0.004777257511, -0.001077301085};

// Cohen (4,4) and (5,5) columns at full double precision. The printed table
// keeps 8 decimals, which is too coarse for the 1e-8 filter identities.
const std::vector<double> kCh44Low = {
    0.0, -0.06453888262869706, -0.04068941760916406, 0.41809227322161724,
    0.7884856164055829, 0.41809227322161724, -0.04068941760916406,
    -0.06453888262869706, 0.0, 0.0};
const std::vector<double> kCh44Dual = {
    0.0, 0.03782845550726404, -0.023849465019556843, -0.11062440441843718,
    0.37740285561283066, 0.8526986790088938, 0.37740285561283066,
    -0.11062440441843718, -0.023849465019556843, 0.03782845550726404};
const std::vector<double> kCh55Low = {
    0.013456709459118716, -0.002694966880111507, -0.13670658466432914,
    -0.09350469740093886, 0.47680326579848425, 0.8995061097486484,
    0.47680326579848425, -0.09350469740093886, -0.13670658466432914,
    -0.002694966880111507, 0.013456709459118716, 0.0};
const std::vector<double> kCh55Dual = {
    0.0, 0.0, 0.03968708834740544, 0.007948108637240322,
    -0.05446378846823691, 0.34560528195603346, 0.7366601814282105,
    0.34560528195603346, -0.05446378846823691, 0.007948108637240322,
    0.03968708834740544, 0.0};

std::vector<double> scaled(std::vector<double> v, double factor) {
  for (double& x : v) x *= factor;
  return v;
}

int first_nonzero(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) return static_cast<int>(i);
  }
  return 0;
}

WaveletSpec orthogonal(std::string name, std::vector<double> low, bool symmetric) {
  WaveletSpec spec;
  spec.name = std::move(name);
  spec.family = Family::Orthogonal;
  spec.analysis_high = derive_highpass(low, static_cast<int>(low.size()) - 1);
  spec.analysis_low = std::move(low);
  spec.synthesis_low = spec.analysis_low;
  spec.synthesis_high = spec.analysis_high;
  spec.support_offset = first_nonzero(spec.analysis_low);
  spec.symmetric = symmetric;
  return spec;
}

// `dual_table` is the printed l~ column. The table lists it in convolution
// order, so it is reversed here to line up with l in correlation order.
WaveletSpec cohen(std::string name, std::vector<double> low, std::vector<double> dual_table) {
  WaveletSpec spec;
  spec.name = std::move(name);
  spec.family = Family::Biorthogonal;
  std::reverse(dual_table.begin(), dual_table.end());
  auto [high, dual_high] = derive_biorthogonal_highpass(
      low, dual_table, static_cast<int>(low.size()) - 1);
  spec.analysis_low = std::move(low);
  spec.analysis_high = std::move(high);
  spec.synthesis_low = std::move(dual_table);
  spec.synthesis_high = std::move(dual_high);
  spec.support_offset = first_nonzero(spec.analysis_low);
  spec.symmetric = true;
  return spec;
}

std::vector<WaveletSpec> build_registry() {
  const double s3 = std::sqrt(3.0);
  std::vector<WaveletSpec> registry;
  registry.push_back(orthogonal("haar", scaled({1.0, 1.0}, 1.0 / kSqrt2), true));
  registry.push_back(orthogonal(
      "db2", scaled({1.0 + s3, 3.0 + s3, 3.0 - s3, 1.0 - s3}, 1.0 / (4.0 * kSqrt2)), false));
  registry.push_back(orthogonal("db3", kDb3, false));
  registry.push_back(orthogonal("db4", kDb4, false));
  registry.push_back(orthogonal("db5", kDb5, false));
  registry.push_back(orthogonal("db6", kDb6, false));
  registry.push_back(cohen("ch2.2", scaled({0.0, 0.25, 0.5, 0.25, 0.0, 0.0}, kSqrt2),
                           scaled({0.0, -0.125, 0.25, 0.75, 0.25, -0.125}, kSqrt2)));
  registry.push_back(cohen("ch3.3", scaled({0.0, 0.0, 1.0, 3.0, 3.0, 1.0, 0.0, 0.0}, kSqrt2 / 8.0),
                           scaled({3.0, -9.0, -7.0, 45.0, 45.0, -7.0, -9.0, 3.0}, kSqrt2 / 64.0)));
  registry.push_back(cohen("ch4.4", kCh44Low, kCh44Dual));
  registry.push_back(cohen("ch5.5", kCh55Low, kCh55Dual));
  return registry;
}

const std::vector<WaveletSpec>& registry() {
  static const std::vector<WaveletSpec> instance = build_registry();
  return instance;
}

double tap(std::span<const double> f, long index) {
  if (index < 0 || index >= static_cast<long>(f.size())) return 0.0;
  return f[static_cast<std::size_t>(index)];
}

// Σ_k a_k b_{k+2m}
double shifted_product(std::span<const double> a, std::span<const double> b, long m) {
  double sum = 0.0;
  for (long k = 0; k < static_cast<long>(a.size()); ++k) sum += a[k] * tap(b, k + 2 * m);
  return sum;
}

long max_shift(const WaveletSpec& spec) {
  const auto len = std::max(spec.analysis_low.size(), spec.synthesis_low.size());
  return static_cast<long>(len / 2 + 1);
}

// Largest deviation of Σ a_k b_{k+2m} from `diagonal`·δ_{m0} over all shifts.
double biorthogonality_residual(std::span<const double> a, std::span<const double> b,
                                long shifts, double diagonal) {
  double worst = 0.0;
  for (long m = -shifts; m <= shifts; ++m) {
    const double target = m == 0 ? diagonal : 0.0;
    worst = std::max(worst, std::abs(shifted_product(a, b, m) - target));
  }
  return worst;
}

std::vector<double> trimmed(const std::vector<double>& v) {
  auto first = std::find_if(v.begin(), v.end(), [](double x) { return x != 0.0; });
  auto last = std::find_if(v.rbegin(), v.rend(), [](double x) { return x != 0.0; }).base();
  if (first >= last) return {};
  return {first, last};
}

double palindrome_residual(const std::vector<double>& v) {
  const auto t = trimmed(v);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t[i] - t[t.size() - 1 - i]));
  return worst;
}

}  // namespace

std::span<const std::string_view> wavelet_names() { return kNames; }

const WaveletSpec& get_wavelet(std::string_view name) {
  for (const auto& spec : registry()) {
    if (spec.name == name) return spec;
  }
  throw Error(Errc::UnknownWavelet, "no wavelet named '" + std::string(name) + "'");
}

std::vector<double> derive_highpass(std::span<const double> low, int n_odd) {
  if (n_odd % 2 == 0) throw Error(Errc::EvenN, "N must be odd, got " + std::to_string(n_odd));
  if (n_odd < 0 || static_cast<std::size_t>(n_odd) + 1 < low.size()) {
    throw Error(Errc::InvalidArgument, "N must be at least len(low) - 1 = " +
                                           std::to_string(static_cast<long>(low.size()) - 1));
  }
  std::vector<double> high(static_cast<std::size_t>(n_odd) + 1);
  for (long k = 0; k <= n_odd; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    high[static_cast<std::size_t>(k)] = sign * tap(low, n_odd - k);
  }
  return high;
}

std::pair<std::vector<double>, std::vector<double>> derive_biorthogonal_highpass(
    std::span<const double> low, std::span<const double> dual_low, int n_odd) {
  return {derive_highpass(dual_low, n_odd), derive_highpass(low, n_odd)};
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const FilterCheck& c) { return c.passed; });
}

const FilterCheck* ValidationReport::find(std::string_view check_name) const {
  for (const auto& c : checks) {
    if (c.name == check_name) return &c;
  }
  return nullptr;
}

ValidationReport validate_filterbank(const WaveletSpec& spec, double tolerance) {
  ValidationReport report;
  report.wavelet = spec.name;
  auto add = [&](std::string name, double residual) {
    report.checks.push_back({std::move(name), std::isfinite(residual) && residual <= tolerance, residual});
  };
  auto sum = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };

  const long shifts = max_shift(spec);
  add("sum_rule", std::abs(sum(spec.analysis_low) - kSqrt2));

  if (spec.family == Family::Orthogonal) {
    add("even_length", spec.analysis_low.size() % 2 == 0 ? 0.0 : 1.0);
    add("norm_rule", std::abs(shifted_product(spec.analysis_low, spec.analysis_low, 0) - 1.0));
    double off = 0.0;
    for (long m = 1; m <= shifts; ++m) {
      off = std::max(off, std::abs(shifted_product(spec.analysis_low, spec.analysis_low, m)));
    }
    add("shift_orthogonality", off);
    double diff = spec.analysis_low.size() == spec.synthesis_low.size() &&
                          spec.analysis_high.size() == spec.synthesis_high.size()
                      ? 0.0
                      : 1.0;
    for (std::size_t i = 0; i < spec.analysis_low.size() && diff == 0.0; ++i) {
      diff = std::max(diff, std::abs(spec.analysis_low[i] - spec.synthesis_low[i]));
    }
    for (std::size_t i = 0; i < spec.analysis_high.size() && i < spec.synthesis_high.size(); ++i) {
      diff = std::max(diff, std::abs(spec.analysis_high[i] - spec.synthesis_high[i]));
    }
    add("synthesis_equals_analysis", diff);
  } else {
    add("dual_sum_rule", std::abs(sum(spec.synthesis_low) - kSqrt2));
    add("biorthogonality", biorthogonality_residual(spec.analysis_low, spec.synthesis_low, shifts, 1.0));
  }

  // Both families: the high-pass pair is biorthogonal and annihilates the
  // opposite low-pass at every even shift.
  add("highpass_biorthogonality",
      biorthogonality_residual(spec.analysis_high, spec.synthesis_high, shifts, 1.0));
  add("cross_annihilation",
      std::max(biorthogonality_residual(spec.analysis_low, spec.synthesis_high, shifts, 0.0),
               biorthogonality_residual(spec.analysis_high, spec.synthesis_low, shifts, 0.0)));

  const double asym = palindrome_residual(spec.analysis_low);
  const bool looks_symmetric = asym <= tolerance;
  report.checks.push_back({"symmetry_flag", looks_symmetric == spec.symmetric,
                           spec.symmetric ? asym : 0.0});
  return report;
}

}  // namespace wavecnet
