#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtfnet/cvnn/adam.hpp"
#include "rtfnet/cvnn/checkpoint.hpp"
#include "rtfnet/cvnn/unet.hpp"
#include "rtfnet/dataset.hpp"

namespace rtfnet::cvnn {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch = 32;
  std::size_t max_epochs = 5000;
  std::size_t patience = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle = true;
  // Draw a fresh mask for every record on every epoch instead of using the
  // stored one. Mask sizes come from mic_choices.
  bool resample_masks = false;
  std::vector<std::size_t> mic_choices = kDefaultMicCounts;

  void validate() const;
  AdamConfig adam() const { return {lr, beta1, beta2, eps}; }
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean per record
  double val_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t bad_epochs = 0;
  std::string stop_reason;  // "", "patience", "max_epochs" or "callback"
};

// Return false to stop after this epoch.
using EpochCallback = std::function<bool(const EpochStats&)>;

/// Mini-batch training with early stopping on validation loss. When training
/// ends the model holds the best-validation parameters and buffers.
template <typename T>
class Trainer {
 public:
  Trainer(UNet<T>& model, TrainConfig config, std::vector<SampleRecord> train,
          std::vector<SampleRecord> validation);

  // Runs epochs until a stop condition; returns the history.
  const TrainHistory& fit(const EpochCallback& callback = {});
  // One epoch including validation and early-stop bookkeeping.
  EpochStats run_epoch();

  bool finished() const { return !history_.stop_reason.empty(); }
  const TrainHistory& history() const { return history_; }
  const TrainConfig& config() const { return config_; }

  // Full training state: model, optimizer moments, best snapshot, rng and
  // history. Loading requires a model with the same spec.
  Checkpoint state() const;
  void restore(const Checkpoint& ckpt);

 private:
  void build_tensors(const SampleRecord& record, ComplexTensor<T>& input, ComplexTensor<T>& target);
  double validation_loss();
  void snapshot_best();
  void load_best();
  void stop(const std::string& reason);

  UNet<T>& model_;
  TrainConfig config_;
  std::vector<SampleRecord> train_;
  std::vector<SampleRecord> validation_;
  Adam<T> adam_;
  Rng rng_;
  TrainHistory history_;
  std::vector<ComplexTensor<T>> best_;
  // Fixed-mask inputs and targets, built once.
  std::vector<ComplexTensor<T>> train_inputs_, train_targets_;
  std::vector<ComplexTensor<T>> val_inputs_, val_targets_;
};

extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace rtfnet::cvnn
