// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavecnet/dataset.hpp"
#include "wavecnet/error.hpp"
#include "wavecnet/nn/model.hpp"

namespace wavecnet::nn {

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;

  bool operator==(const EpochStats&) const = default;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::uint64_t checksum = 0;  // Model::checksum() after the last step
  double wall_seconds = 0.0;
  bool diverged = false;

  /// One row per epoch. Timing is left out so that reruns compare equal.
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// SGD with momentum. The learning rate drops tenfold at ceil(epochs / 2)
/// and again at ceil(3 * epochs / 4) completed epochs.
struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::size_t batch = 64;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;  // shuffling
  std::function<void(const EpochStats&)> on_epoch;
};

/// Learning rate in effect during the given 0-based epoch.
double scheduled_rate(const TrainConfig& cfg, std::size_t epoch);

/// Raised when the loss becomes NaN or infinite; carries the epochs that
/// finished before it.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& message, TrainReport partial)
      : Error(Errc::DivergedLoss, message), report_(std::move(partial)) {}
  const TrainReport& report() const { return report_; }

 private:
  TrainReport report_;
};

/// Deterministic for a fixed (model seed, cfg.seed, data). The validation
/// set may be null, in which case validation columns are zero.
template <class T>
TrainReport train(Model<T>& model, const Dataset& train_set, const Dataset* validation, const TrainConfig& cfg);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  double error = 0.0;
  std::size_t count = 0;
};

/// Evaluation-mode loss and accuracy. Batches may be split across threads;
/// the result does not depend on the split.
template <class T>
Evaluation evaluate(const Model<T>& model, const Dataset& data, std::size_t batch = 256, std::size_t threads = 1);

}  // namespace wavecnet::nn
