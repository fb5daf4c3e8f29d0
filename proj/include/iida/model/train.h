// Copyright 2026 The IIDA Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IIDA_MODEL_TRAIN_H_
#define IIDA_MODEL_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "iida/datastore/dataset.h"
#include "iida/model/model.h"

namespace iida::model {

struct TrainConfig {
  int epochs = 20;
  // 0 means one pass worth of items: ceil(train transitions / batch_size).
  int steps_per_epoch = 0;
  int batch_size = 64;
  double learning_rate = 1e-3;
  // If positive, the rate decays geometrically to this value at the last step.
  double final_learning_rate = 0.0;
  std::uint64_t seed = 0;
  // Refit the normalizer on the train split before the first step.
  bool fit_normalizer = true;
  // Retain the parameters with the lowest validation MSE.
  bool keep_best = true;
};

struct MetricRow {
  std::int64_t step = 0;
  double train_loss = 0.0;  // mean batch loss over the epoch
  double val_mse = 0.0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<MetricRow> log;
  double best_val_mse = 0.0;
  std::int64_t best_step = 0;
};

// Raised when a batch produces a non-finite loss or gradient; the message
// carries the step and the batch seed needed to replay it.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& message, std::int64_t step, std::uint64_t batch_seed)
      : std::runtime_error(message), step_(step), batch_seed_(batch_seed) {}
  std::int64_t step() const { return step_; }
  std::uint64_t batch_seed() const { return batch_seed_; }

 private:
  std::int64_t step_;
  std::uint64_t batch_seed_;
};

// One training item: target transition plus a context drawn from the same
// environment with the target excluded.
struct BatchItem {
  const data::EnvDataset* env = nullptr;
  std::size_t target = 0;
  ContextSet context;
};

std::vector<BatchItem> SampleBatch(const std::vector<const data::EnvDataset*>& envs, int batch_size,
                                   int context_n, std::uint64_t batch_seed);

// Scalar loss over a batch, in normalized target units.
Tensor BatchLoss(const Model& model, const std::vector<BatchItem>& batch);

// Minibatch Adam on the train split; validation MSE after every epoch.
TrainResult Train(Model& model, const data::DatasetCollection& collection,
                  const TrainConfig& config);

// CSV: step,train_loss,val_mse,seed
void WriteMetricLog(const TrainResult& result, const std::filesystem::path& path);

std::vector<envsim::Transition> SplitTransitions(const data::DatasetCollection& collection,
                                                 data::Split split);

}  // namespace iida::model

#endif  // IIDA_MODEL_TRAIN_H_
