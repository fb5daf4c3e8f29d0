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

#include "iida/model/train.h"

#include <cmath>

#include "iida/common/text.h"
#include "iida/model/evaluate.h"
#include "iida/numcore/adam.h"
#include "iida/numcore/ops.h"

namespace iida::model {

std::vector<envsim::Transition> SplitTransitions(const data::DatasetCollection& collection,
                                                 data::Split split) {
  std::vector<envsim::Transition> out;
  for (const data::EnvDataset* env : collection.Select(split)) {
    out.insert(out.end(), env->transitions.begin(), env->transitions.end());
  }
  return out;
}

std::vector<BatchItem> SampleBatch(const std::vector<const data::EnvDataset*>& envs, int batch_size,
                                   int context_n, std::uint64_t batch_seed) {
  if (envs.empty()) throw std::invalid_argument("train: no environments to sample from");
  Rng rng(batch_seed);
  std::vector<BatchItem> batch(batch_size);
  for (BatchItem& item : batch) {
    item.env = envs[UniformIndex(rng, envs.size())];
    item.target = UniformIndex(rng, item.env->transitions.size());
    item.context = data::SampleContext(*item.env, context_n, item.target, rng);
  }
  return batch;
}

Tensor BatchLoss(const Model& model, const std::vector<BatchItem>& batch) {
  std::vector<Vec> states, actions;
  std::vector<double> targets;
  std::vector<const ContextSet*> contexts;
  std::vector<const EnvParams*> params;
  for (const BatchItem& item : batch) {
    const envsim::Transition& t = item.env->transitions[item.target];
    states.push_back(t.s);
    actions.push_back(t.a);
    for (double v : model.NormalizedTarget(t)) targets.push_back(v);
    contexts.push_back(&item.context);
    params.push_back(&item.env->params);
  }
  const Tensor prediction =
      model.ForwardNormalized(states, actions, model.ConditioningBatch(contexts, params));
  const Tensor target =
      Tensor::Constant({static_cast<int>(batch.size()), model.spec().state_dim}, targets);
  return model.spec().loss == LossKind::kMse ? numcore::SquaredError(prediction, target)
                                             : numcore::MeanResidualNorm(prediction, target);
}

TrainResult Train(Model& model, const data::DatasetCollection& collection,
                  const TrainConfig& config) {
  if (config.epochs < 0 || config.batch_size <= 0 || config.steps_per_epoch < 0) {
    throw std::invalid_argument("train: epochs, batch_size and steps_per_epoch must be valid");
  }
  const auto train_envs = collection.Select(data::Split::kTrain);
  if (train_envs.empty()) throw std::invalid_argument("train: dataset has no train split");
  if (collection.Select(data::Split::kVal).empty()) {
    throw std::invalid_argument("train: dataset has no val split");
  }
  if (config.fit_normalizer) {
    model.set_normalizer(
        Normalizer::Fit(model.spec(), SplitTransitions(collection, data::Split::kTrain)));
  }
  std::size_t total = 0;
  for (const auto* env : train_envs) total += env->transitions.size();
  const int steps_per_epoch =
      config.steps_per_epoch > 0
          ? config.steps_per_epoch
          : static_cast<int>((total + config.batch_size - 1) / config.batch_size);

  numcore::AdamState adam;
  adam.config.learning_rate = config.learning_rate;
  std::vector<Tensor> params = model.parameters().tensors();
  const std::uint64_t batch_root = DeriveSeed(config.seed, "train/batches");
  const std::uint64_t val_seed = DeriveSeed(config.seed, "train/val");
  const int context_n = model.spec().context_n;

  TrainResult result;
  result.best_val_mse = INFINITY;
  auto best = model.parameters().Snapshot();
  const std::int64_t total_steps = static_cast<std::int64_t>(config.epochs) * steps_per_epoch;
  std::int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (int k = 0; k < steps_per_epoch; ++k, ++step) {
      const std::uint64_t batch_seed = DeriveSeed(batch_root, static_cast<std::uint64_t>(step));
      try {
        const auto batch = SampleBatch(train_envs, config.batch_size,
                                       model.spec().uses_context() ? context_n : 0, batch_seed);
        if (config.final_learning_rate > 0.0 && total_steps > 1) {
          const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
          adam.config.learning_rate =
              config.learning_rate * std::pow(config.final_learning_rate / config.learning_rate, t);
        }
        model.parameters().ZeroGrad();
        const Tensor loss = BatchLoss(model, batch);
        if (!std::isfinite(loss.item())) throw numcore::NumericError("loss is not finite");
        numcore::Backward(loss);
        numcore::AdamStep(params, adam);
        loss_sum += loss.item();
      } catch (const numcore::NumericError& e) {
        throw TrainingError("non-finite training loss at step " + std::to_string(step) +
                                " (batch seed " + std::to_string(batch_seed) + "): " + e.what(),
                            step, batch_seed);
      }
    }
    MetricRow row;
    row.step = step;
    row.train_loss = steps_per_epoch > 0 ? loss_sum / steps_per_epoch : 0.0;
    row.val_mse = EvaluateMse(model, collection, data::Split::kVal, context_n, val_seed);
    row.seed = config.seed;
    result.log.push_back(row);
    if (row.val_mse < result.best_val_mse) {
      result.best_val_mse = row.val_mse;
      result.best_step = step;
      if (config.keep_best) best = model.parameters().Snapshot();
    }
  }
  if (config.keep_best && !result.log.empty()) model.parameters().Restore(best);
  return result;
}

void WriteMetricLog(const TrainResult& result, const std::filesystem::path& path) {
  CsvWriter csv({"step", "train_loss", "val_mse", "seed"});
  for (const MetricRow& r : result.log) {
    csv.AddRow({std::to_string(r.step), FormatDouble(r.train_loss), FormatDouble(r.val_mse),
                std::to_string(r.seed)});
  }
  csv.Write(path);
}

}  // namespace iida::model
