#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seeaction/dataset.hpp"
#include "seeaction/eval.hpp"
#include "seeaction/model.hpp"

namespace seeaction::train {

struct TrainConfig {
  model::TrainMode mode = model::TrainMode::Multitask;
  std::vector<model::Stream> streams = model::all_streams();
  int epochs = 10;
  int folds = 5;
  double split = 0.8;
  int max_len = 6;
  uint64_t seed = 0;
  int batch_size = 8;
  double learning_rate = 1e-3;
  int side = 64;
  int frames = 8;
  // Encoder widths; empty keeps the model defaults.
  std::vector<int> channels;
  int embed_dim = 512;
  int head_hidden = 256;
  // Stop once training accuracy reaches these (checked every epoch when set).
  std::optional<double> stop_command_acc;
  std::optional<double> stop_widget_acc;
  std::optional<double> stop_token_acc;

  void validate() const;
  model::ModelConfig model_config() const;
};

struct EvalResult {
  eval::ClassificationReport command;
  eval::ClassificationReport widget;
  eval::CaptionScores location;
  double token_accuracy = 0.0;
  double malformed_rate = 0.0;  // unsent_gen only
  std::vector<StructuredAction> predictions;  // malformed sentences keep their raw tokens as location
  std::vector<bool> malformed;
  std::vector<StructuredAction> labels;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double command_loss = 0.0;
  double widget_loss = 0.0;
  double location_loss = 0.0;
  std::optional<EvalResult> train_eval;
};

struct TrainResult {
  model::SeeActionModel model;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Adam over seeded per-epoch shuffles of `train_idx`. The location vocabulary
// is built from the training samples only.
TrainResult train(const std::vector<dataset::Sample>& samples, const std::vector<size_t>& train_idx,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Token accuracy compares the decoded sequence, closed by <end>, position by
// position against the reference phrase plus <end>.
EvalResult evaluate(const model::SeeActionModel& m, const std::vector<dataset::Sample>& samples,
                    const std::vector<size_t>& indices, int jobs = 1);

double token_accuracy(const std::vector<std::vector<std::string>>& predicted,
                      const std::vector<std::vector<std::string>>& reference);

// Seeded shuffle, first round(split * n) indices train, rest test.
std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(size_t n, double split, uint64_t seed);

struct FoldResult {
  EvalResult test;
  std::vector<EpochStats> history;
};

std::vector<FoldResult> cross_validate(const std::vector<dataset::Sample>& samples, const TrainConfig& cfg,
                                       const EpochCallback& on_epoch = {});

nlohmann::json to_json(const EvalResult& r, bool unsent);

}  // namespace seeaction::train
