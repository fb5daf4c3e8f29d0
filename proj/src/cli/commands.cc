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

#include "iida/cli/commands.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "iida/analysis/analysis.h"
#include "iida/common/random.h"
#include "iida/common/text.h"
#include "iida/control/cem.h"
#include "iida/datastore/dataset.h"
#include "iida/model/evaluate.h"
#include "iida/model/model.h"
#include "iida/model/train.h"

namespace iida::cli {
namespace fs = std::filesystem;
namespace {

fs::path OutDir(const RunConfig& config) {
  fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
  return dir;
}

data::DatasetCollection LoadDataset(const std::string& path) {
  if (path.empty()) throw MissingInput("--dataset is required");
  if (!fs::exists(path)) throw MissingInput("dataset file not found: " + path);
  return data::Load(path);
}

model::Model LoadCheckpoint(const std::string& path) {
  if (!fs::exists(path)) throw MissingInput("checkpoint file not found: " + path);
  return model::Model::Load(path);
}

const std::string& SingleCheckpoint(const RunConfig& config) {
  if (config.checkpoints.empty()) throw MissingInput("--checkpoint is required");
  if (config.checkpoints.size() > 1) {
    throw std::invalid_argument("this command takes exactly one --checkpoint");
  }
  return config.checkpoints[0];
}

void CheckFamily(const model::Model& m, const data::DatasetCollection& c) {
  if (m.spec().family != c.family) {
    throw std::invalid_argument("checkpoint family '" + m.spec().family +
                                "' does not match dataset family '" + c.family + "'");
  }
}

int ContextSize(const RunConfig& config, const model::Model& m) {
  return config.context_n >= 0 ? config.context_n : m.spec().context_n;
}

std::string Write(const fs::path& path, const std::string& text) {
  WriteTextFile(path, text);
  return path.string();
}

std::string MeanStd(const std::vector<double>& v) {
  double mean = 0.0, var = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size());
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4e ± %.1e", mean, std::sqrt(var));
  return buf;
}

model::TrainResult TrainOne(model::Model& m, const data::DatasetCollection& c, int epochs,
                            std::uint64_t seed) {
  model::TrainConfig tc;
  tc.epochs = epochs;
  tc.seed = DeriveSeed(seed, "train/loop");
  return model::Train(m, c, tc);
}

model::ModelSpec SpecFor(const data::DatasetCollection& c, const std::string& encoder,
                         int context_n) {
  model::ModelSpec spec = model::DefaultSpec(c.family_ref(), model::ParseEncoder(encoder));
  if (context_n >= 0) spec.context_n = context_n;
  return spec;
}

}  // namespace

FamilyDefaults DefaultsFor(const std::string& family) {
  envsim::FamilyByName(family);  // validates the name
  if (family == "slidepuck") return {1000, 100, 100, 10};
  if (family == "pushbox") return {100, 20, 20, 2000};
  return {100, 20, 20, 200};
}

std::vector<std::string> GenData(const RunConfig& config) {
  const envsim::Family& family = envsim::FamilyByName(config.family);
  const FamilyDefaults d = DefaultsFor(config.family);
  data::SplitCounts counts{config.train_envs >= 0 ? config.train_envs : d.train_envs,
                           config.val_envs >= 0 ? config.val_envs : d.val_envs,
                           config.test_envs >= 0 ? config.test_envs : d.test_envs};
  const int actions = config.actions > 0 ? config.actions : d.actions;
  const auto collection = data::GenerateCollection(family, counts, actions, config.seed);
  const fs::path path = OutDir(config) / "dataset.jsonl";
  data::Save(collection, path);
  return {path.string()};
}

std::vector<std::string> TrainModel(const RunConfig& config) {
  const auto c = LoadDataset(config.dataset);
  model::Model m(SpecFor(c, config.encoder, config.context_n),
                 DeriveSeed(config.seed, "train/init"));
  const model::TrainResult r = TrainOne(m, c, config.epochs, config.seed);
  const fs::path dir = OutDir(config);
  m.Save(dir / "checkpoint.json");
  model::WriteMetricLog(r, dir / "train_log.csv");
  return {(dir / "checkpoint.json").string(), (dir / "train_log.csv").string()};
}

std::vector<std::string> Eval(const RunConfig& config) {
  const auto c = LoadDataset(config.dataset);
  const model::Model m = LoadCheckpoint(SingleCheckpoint(config));
  CheckFamily(m, c);
  const int n = ContextSize(config, m);
  CsvWriter csv({"split", "context_n", "mse"});
  for (data::Split split : {data::Split::kTrain, data::Split::kVal, data::Split::kTest}) {
    if (c.Select(split).empty()) continue;
    const double mse = model::EvaluateMse(m, c, split, n, DeriveSeed(config.seed, "eval"));
    csv.AddRow({std::string(data::SplitName(split)), std::to_string(n), FormatDouble(mse)});
  }
  return {Write(OutDir(config) / "eval.csv", csv.ToString())};
}

std::vector<std::string> Sweep(const RunConfig& config) {
  const auto c = LoadDataset(config.dataset);
  const model::Model m = LoadCheckpoint(SingleCheckpoint(config));
  CheckFamily(m, c);
  const auto rows = analysis::ContextSweep(m, c, data::ParseSplit(config.split), config.sizes,
                                           DeriveSeed(config.seed, "sweep"), config.eval_seeds);
  return {Write(OutDir(config) / "sweep.csv", analysis::SweepCsv(rows))};
}

std::vector<std::string> Consistency(const RunConfig& config) {
  const auto c = LoadDataset(config.dataset);
  const model::Model m = LoadCheckpoint(SingleCheckpoint(config));
  CheckFamily(m, c);
  const int n = ContextSize(config, m);
  const analysis::LatentBank bank = analysis::BuildLatentBank(
      m, c, data::ParseSplit(config.split), n, DeriveSeed(config.seed, "consistency"),
      config.subsamples, config.envs);
  const fs::path dir = OutDir(config);
  std::vector<std::string> paths;
  paths.push_back(Write(dir / "latents.csv", analysis::LatentCsv(bank)));
  CsvWriter report({"context_n", "self_consistency", "random_baseline"});
  report.AddRow({std::to_string(n), FormatDouble(analysis::SelfConsistency(bank)),
                 FormatDouble(analysis::RandomBaseline(bank))});
  paths.push_back(Write(dir / "consistency.csv", report.ToString()));
  paths.push_back(
      Write(dir / "pca.csv", analysis::ProjectionCsv(bank, analysis::ProjectPca(bank.latents))));
  return paths;
}

std::vector<std::string> Slide(const RunConfig& config) {
  const auto c = LoadDataset(config.dataset);
  const envsim::Family& family = c.family_ref();
  if (config.checkpoints.empty()) throw MissingInput("--checkpoint is required (repeatable)");
  std::vector<model::Model> models;
  std::vector<std::string> names;
  std::map<std::string, int> seen;
  for (const auto& path : config.checkpoints) {
    models.push_back(LoadCheckpoint(path));
    CheckFamily(models.back(), c);
    std::string name(model::EncoderName(models.back().spec().encoder));
    if (++seen[name] > 1) name += "_" + std::to_string(seen[name]);
    names.push_back(name);
  }
  control::CEMConfig cem =
      control::DefaultCemConfig(family, model::SplitTransitions(c, data::Split::kTrain));
  cem.population = config.population;
  cem.elite_fraction = config.elite_fraction;
  cem.iterations = config.iterations;
  cem.max_retries = config.max_retries;

  auto envs = c.Select(data::Split::kTest);
  if (config.envs > 0 && static_cast<int>(envs.size()) > config.envs) envs.resize(config.envs);
  if (envs.empty()) throw std::invalid_argument("dataset has no test environments");

  std::vector<std::vector<std::string>> rows;
  std::vector<int> successes(models.size() + 1, 0);
  int total_goals = 0;
  for (const data::EnvDataset* env : envs) {
    // One goal list per environment, shared by every model: the last
    // `goals` transitions. Contexts come from the ones before them.
    const std::size_t num_goals =
        std::min<std::size_t>(env->transitions.size(), std::max(config.goals, 0));
    const auto split_at = env->transitions.end() - static_cast<std::ptrdiff_t>(num_goals);
    std::vector<envsim::Transition> goals(split_at, env->transitions.end());
    data::EnvDataset evidence = *env;
    if (split_at != env->transitions.begin()) {
      evidence.transitions.assign(env->transitions.begin(), split_at);
    }
    total_goals += static_cast<int>(goals.size());
    const std::uint64_t env_seed =
        DeriveSeed(DeriveSeed(config.seed, "slide"), static_cast<std::uint64_t>(env->env_id));
    for (std::size_t k = 0; k <= models.size(); ++k) {
      control::GoalReport report;
      std::string name = "oracle";
      if (k < models.size()) {
        const model::Model& m = models[k];
        const auto context = data::SampleContext(evidence, ContextSize(config, m), std::nullopt,
                                                 DeriveSeed(env_seed, "context"));
        report = control::GoalReachingEval(
            control::ModelPredictor(m, m.Conditioning(context, env->params)), family, env->params,
            env->env_id, goals, cem, DeriveSeed(env_seed, "cem"));
        name = names[k];
      } else {
        report = control::GoalReachingEval(control::SimulatorPredictor(family, env->params), family,
                                           env->params, env->env_id, goals, cem,
                                           DeriveSeed(env_seed, "cem"));
      }
      for (const auto& o : report.outcomes) successes[k] += o.success;
      for (auto& row : control::OutcomeRows(name, report)) rows.push_back(std::move(row));
    }
  }
  CsvWriter detail(control::OutcomeHeader(family.state_width(), family.action_width()));
  for (auto& row : rows) detail.AddRow(std::move(row));

  const double radius = control::SuccessRadius(family);
  CsvWriter summary({"model", "envs", "goals", "success_rate", "threshold", "radius_fraction"});
  for (std::size_t k = 0; k <= models.size(); ++k) {
    const double rate = total_goals == 0 ? 1.0 : static_cast<double>(successes[k]) / total_goals;
    summary.AddRow({k < models.size() ? names[k] : "oracle", std::to_string(envs.size()),
                    std::to_string(total_goals), FormatDouble(rate), FormatDouble(radius),
                    FormatDouble(radius / family.workspace_span())});
  }
  const fs::path dir = OutDir(config);
  return {Write(dir / "slide.csv", detail.ToString()),
          Write(dir / "slide_summary.csv", summary.ToString())};
}

std::vector<std::string> Table1(const RunConfig& config) {
  std::vector<std::string> paths = config.datasets;
  if (paths.empty() && !config.dataset.empty()) paths.push_back(config.dataset);
  if (paths.empty()) throw MissingInput("--dataset is required (repeatable, one per family)");
  if (config.seeds < 1) throw std::invalid_argument("--seeds must be >= 1");
  for (const auto& e : config.encoders) model::ParseEncoder(e);

  std::vector<std::string> header = {"family"};
  header.insert(header.end(), config.encoders.begin(), config.encoders.end());
  CsvWriter table(header);
  CsvWriter runs({"family", "encoder", "seed", "best_val_mse", "test_mse"});
  for (const auto& path : paths) {
    const auto c = LoadDataset(path);
    std::vector<std::string> row = {c.family};
    for (const auto& encoder : config.encoders) {
      std::vector<double> mses;
      for (int k = 0; k < config.seeds; ++k) {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(k);
        model::Model m(SpecFor(c, encoder, config.context_n), DeriveSeed(seed, "train/init"));
        const model::TrainResult r = TrainOne(m, c, config.epochs, seed);
        const double mse = model::EvaluateMse(m, c, data::Split::kTest, m.spec().context_n,
                                              DeriveSeed(seed, "table1/eval"));
        mses.push_back(mse);
        runs.AddRow({c.family, encoder, std::to_string(seed), FormatDouble(r.best_val_mse),
                     FormatDouble(mse)});
      }
      row.push_back(MeanStd(mses));
    }
    table.AddRow(std::move(row));
  }
  const fs::path dir = OutDir(config);
  return {Write(dir / "table1.csv", table.ToString()),
          Write(dir / "table1_runs.csv", runs.ToString())};
}

}  // namespace iida::cli
