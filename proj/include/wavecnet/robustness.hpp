// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wavecnet/dataset.hpp"
#include "wavecnet/tensor.hpp"

namespace wavecnet {

enum class NoiseKind { Gaussian, Shot, Impulse };

/// "gaussian_noise", "shot_noise", "impulse_noise".
std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);
std::span<const NoiseKind> all_noise_kinds();

/// Per-severity parameters: Gaussian standard deviation, shot-noise photon
/// count scale, impulse replacement fraction.
struct SeverityTable {
  std::array<double, 5> gaussian{0.08, 0.12, 0.18, 0.26, 0.38};
  std::array<double, 5> shot{60, 25, 12, 5, 3};
  std::array<double, 5> impulse{0.03, 0.06, 0.09, 0.17, 0.27};

  double parameter(NoiseKind kind, int severity) const;
  /// Throws InvalidConfig for negative sigmas, non-positive counts or
  /// fractions outside [0, 1].
  void validate() const;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static SeverityTable from_json(const nlohmann::json& j);
};

struct CorruptOptions {
  SeverityTable table;
  bool clip = true;
  std::size_t threads = 1;
};

/// Applies one noise corruption to [H,W], [C,H,W] or [N,C,H,W] images in
/// [0, 1]. Image i of a batch draws from its own stream derived from
/// (seed, i), so results do not depend on the thread count. Throws
/// BadSeverity unless severity is 1..5.
template <class T>
Tensor<T> corrupt(const Tensor<T>& images, NoiseKind kind, int severity, std::uint64_t seed,
                  const CorruptOptions& options = {});

/// Corruption error on the x100 scale: 100 * sum(errors) / sum(reference).
/// Both spans hold the five severities. Throws ZeroReference when the
/// reference sum is not positive.
double corruption_error(std::span<const double> errors, std::span<const double> reference);

enum class Category { Noise, Blur, Weather, Digital };

std::string_view to_string(Category category);
Category parse_category(std::string_view name);
std::span<const std::string> category_members(Category category);

/// Arithmetic mean of the category's CE values. Throws MissingCorruption
/// naming every absent member.
double mean_ce(const std::map<std::string, double>& ces, Category category);

/// Top-1 error per corruption and severity.
struct ErrorMatrix {
  struct Row {
    std::string corruption;
    std::array<double, 5> errors{};
  };

  std::string model;
  std::vector<Row> rows;

  const Row* find(std::string_view corruption) const;
  /// Adds or replaces a row. Throws InvalidArgument for values outside [0, 1].
  void set(const std::string& corruption, const std::array<double, 5>& errors);
  void validate() const;

  /// Header "corruption,s1,s2,s3,s4,s5".
  std::string to_csv() const;
  static ErrorMatrix from_csv(std::string_view text, std::string model = {});
  nlohmann::json to_json() const;
  static ErrorMatrix from_json(const nlohmann::json& j);

  bool operator==(const ErrorMatrix&) const;
};

/// Noise error matrix of a classifier. The corrupted copies for
/// (kind, severity) depend only on (seed, kind, severity), so two models
/// evaluated with one seed see identical inputs.
ErrorMatrix noise_error_matrix(const Classifier& model, const Dataset& data, std::span<const NoiseKind> kinds,
                               std::uint64_t seed, const CorruptOptions& options = {}, std::string name = {});

struct RobustnessReport {
  ErrorMatrix errors;
  ErrorMatrix reference;
  std::vector<std::pair<std::string, double>> ce;  // in errors' row order
  std::vector<std::pair<Category, double>> mce;
  /// Categories whose CE values were supplied from outside.
  std::vector<Category> external;

  /// Rows per corruption (severities 1..5 and CE), then one row per mCE.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// CE for every corruption present in both matrices, and mCE for every
/// category whose members are all available. `external_ces` supplies CE
/// values for corruptions without generators (blur, weather, digital).
RobustnessReport robustness_report(const ErrorMatrix& errors, const ErrorMatrix& reference,
                                   const std::map<std::string, double>& external_ces = {});

struct ShiftPair {
  int h0 = 0, w0 = 0, h1 = 0, w1 = 0;
};

/// Shifts are drawn uniformly from [-range, range] for each of the four
/// offsets unless explicit pairs are given.
struct ShiftTrialConfig {
  int range = 8;
  std::size_t pairs = 64;
  std::uint64_t seed = 0;
  std::vector<ShiftPair> explicit_pairs;
  std::size_t threads = 1;
};

/// Moves image content by (dh, dw): reflect-pad, then crop back to size.
/// Throws ShiftOutOfRange when a shift reaches the image size.
template <class T>
Tensor<T> shift_images(const Tensor<T>& images, int dh, int dw);

/// Percentage of (image, pair) trials whose two shifted copies get the same
/// prediction.
double shift_consistency(const Classifier& model, const Tensor<float>& images, const ShiftTrialConfig& cfg);

}  // namespace wavecnet
