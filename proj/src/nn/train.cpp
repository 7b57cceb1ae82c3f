// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The wavecnet Authors

#include "wavecnet/nn/train.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace wavecnet::nn {
namespace {

template <class T>
Tensor<T> batch_images(const Dataset& data, std::span<const std::size_t> idx) {
  Shape shape = data.images.shape();
  const std::size_t per = data.images.size() / shape[0];
  shape[0] = idx.size();
  std::vector<T> out(idx.size() * per);
  const auto src = data.images.data();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(src.begin() + idx[i] * per, per, out.begin() + i * per);
  }
  return Tensor<T>(std::move(shape), std::move(out));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string TrainReport::to_csv() const {
  std::string out = "epoch,learning_rate,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch) + "," + fmt(e.learning_rate) + "," + fmt(e.train_loss) + "," +
           fmt(e.train_accuracy) + "," + fmt(e.val_loss) + "," + fmt(e.val_accuracy) + "\n";
  }
  return out;
}

nlohmann::json TrainReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : epochs) {
    rows.push_back({{"epoch", e.epoch},
                    {"learning_rate", e.learning_rate},
                    {"train_loss", e.train_loss},
                    {"train_accuracy", e.train_accuracy},
                    {"val_loss", e.val_loss},
                    {"val_accuracy", e.val_accuracy}});
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << checksum;
  return {{"epochs", rows}, {"checksum", hex.str()}, {"wall_seconds", wall_seconds}, {"diverged", diverged}};
}

double scheduled_rate(const TrainConfig& cfg, std::size_t epoch) {
  const std::size_t first = (cfg.epochs + 1) / 2;
  const std::size_t second = (3 * cfg.epochs + 3) / 4;
  double lr = cfg.learning_rate;
  if (epoch >= first) lr *= 0.1;
  if (epoch >= second) lr *= 0.1;
  return lr;
}

template <class T>
TrainReport train(Model<T>& model, const Dataset& train_set, const Dataset* validation, const TrainConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t classes = model.config().classes;
  if (train_set.size() == 0) throw Error(Errc::InvalidArgument, "training set is empty");
  if (cfg.batch == 0 || cfg.epochs == 0) throw Error(Errc::InvalidArgument, "batch and epochs must be positive");
  if (cfg.learning_rate < 0 || cfg.momentum < 0 || cfg.weight_decay < 0) {
    throw Error(Errc::InvalidArgument, "learning rate, momentum and weight decay must be non-negative");
  }
  train_set.validate(classes);
  if (validation) validation->validate(classes);

  auto params = model.parameters();
  std::vector<std::vector<T>> velocity;
  for (auto* p : params) velocity.emplace_back(p->value.size(), T{});

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates on raw generator output; std::shuffle's draw pattern is
    // library-specific.
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    const T lr = static_cast<T>(scheduled_rate(cfg, epoch));
    const T mu = static_cast<T>(cfg.momentum), wd = static_cast<T>(cfg.weight_decay);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      std::vector<std::size_t> labels(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) labels[i] = train_set.labels[idx[i]];

      model.zero_grad();
      const auto logits = model.forward(batch_images<T>(train_set, idx));
      const auto loss = softmax_cross_entropy(logits, labels);
      if (!std::isfinite(loss.loss)) {
        report.diverged = true;
        report.checksum = model.checksum();
        report.wall_seconds = elapsed();
        throw TrainingDiverged("loss became non-finite in epoch " + std::to_string(epoch + 1), report);
      }
      model.backward(loss.grad);
      loss_sum += loss.loss * static_cast<double>(idx.size());
      correct += loss.correct;

      for (std::size_t k = 0; k < params.size(); ++k) {
        auto& value = params[k]->value.storage();
        const auto& grad = params[k]->grad.storage();
        auto& v = velocity[k];
        for (std::size_t i = 0; i < value.size(); ++i) {
          v[i] = mu * v[i] + grad[i] + wd * value[i];
          value[i] -= lr * v[i];
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.learning_rate = scheduled_rate(cfg, epoch);
    stats.train_loss = loss_sum / static_cast<double>(order.size());
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!std::isfinite(stats.train_loss)) {
      report.diverged = true;
      report.checksum = model.checksum();
      report.wall_seconds = elapsed();
      throw TrainingDiverged("loss became non-finite in epoch " + std::to_string(epoch + 1), report);
    }
    if (validation) {
      const auto ev = evaluate(model, *validation);
      stats.val_loss = ev.loss;
      stats.val_accuracy = ev.accuracy;
    }
    report.epochs.push_back(stats);
    if (cfg.on_epoch) cfg.on_epoch(stats);
  }
  report.checksum = model.checksum();
  report.wall_seconds = elapsed();
  return report;
}

template <class T>
Evaluation evaluate(const Model<T>& model, const Dataset& data, std::size_t batch, std::size_t threads) {
  if (data.size() == 0) throw Error(Errc::InvalidArgument, "evaluation set is empty");
  data.validate(model.config().classes);
  batch = std::max<std::size_t>(batch, 1);
  threads = std::max<std::size_t>(threads, 1);
  const std::size_t batches = (data.size() + batch - 1) / batch;
  // Per-batch partial sums, reduced in batch order afterwards.
  std::vector<double> losses(batches, 0.0);
  std::vector<std::size_t> hits(batches, 0);
  auto run = [&](std::size_t b) {
    const std::size_t begin = b * batch, end = std::min(data.size(), begin + batch);
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const std::span<const std::size_t> labels(data.labels.data() + begin, end - begin);
    const auto r = softmax_cross_entropy(model.infer(batch_images<T>(data, idx)), labels);
    losses[b] = r.loss * static_cast<double>(end - begin);
    hits[b] = r.correct;
  };
  if (threads == 1 || batches == 1) {
    for (std::size_t b = 0; b < batches; ++b) run(b);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t b = t; b < batches; b += threads) run(b);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  Evaluation ev;
  ev.count = data.size();
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    loss += losses[b];
    correct += hits[b];
  }
  ev.loss = loss / static_cast<double>(ev.count);
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.count);
  ev.error = static_cast<double>(ev.count - correct) / static_cast<double>(ev.count);
  return ev;
}

template TrainReport train(Model<float>&, const Dataset&, const Dataset*, const TrainConfig&);
template TrainReport train(Model<double>&, const Dataset&, const Dataset*, const TrainConfig&);
template Evaluation evaluate(const Model<float>&, const Dataset&, std::size_t, std::size_t);
template Evaluation evaluate(const Model<double>&, const Dataset&, std::size_t, std::size_t);

}  // namespace wavecnet::nn
