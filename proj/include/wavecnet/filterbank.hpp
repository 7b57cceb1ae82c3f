// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wavecnet {

enum class Family { Orthogonal, Biorthogonal };

/// A named two-channel filter bank. Coefficients are stored zero-based in
/// correlation order: row k of the analysis matrix places analysis_low[j] at
/// column 2k + j. For orthogonal wavelets the synthesis filters equal the
/// analysis filters.
struct WaveletSpec {
  std::string name;
  Family family = Family::Orthogonal;
  std::vector<double> analysis_low;
  std::vector<double> analysis_high;
  std::vector<double> synthesis_low;
  std::vector<double> synthesis_high;
  int support_offset = 0;  // first nonzero tap of analysis_low
  bool symmetric = false;

  std::size_t length() const { return analysis_low.size(); }
};

/// The ten supported identifiers, in registry order.
std::span<const std::string_view> wavelet_names();

/// Looks up a registry wavelet. Throws Error(UnknownWavelet) otherwise.
const WaveletSpec& get_wavelet(std::string_view name);

/// h[k] = (-1)^k low[n_odd - k] for k in [0, n_odd]. Requires n_odd odd and
/// n_odd >= len(low) - 1 so that no tap falls at a negative index.
std::vector<double> derive_highpass(std::span<const double> low, int n_odd);

/// Returns (analysis_high, synthesis_high): the analysis high-pass is the
/// reflected dual low-pass, the synthesis high-pass the reflected primal one.
std::pair<std::vector<double>, std::vector<double>> derive_biorthogonal_highpass(
    std::span<const double> low, std::span<const double> dual_low, int n_odd);

struct FilterCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
};

struct ValidationReport {
  std::string wavelet;
  std::vector<FilterCheck> checks;

  bool ok() const;
  const FilterCheck* find(std::string_view check_name) const;
};

/// Checks the sum rule, the orthogonal norm/shift rules, biorthogonality and
/// symmetry. Failures are reported, never thrown.
ValidationReport validate_filterbank(const WaveletSpec& spec, double tolerance = 1e-8);

}  // namespace wavecnet
