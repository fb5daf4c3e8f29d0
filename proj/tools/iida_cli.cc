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

// Command-line entry points for the IIDA pipeline.
//
//   iida gen-data --family slidepuck --seed 1 --out data/
//   iida train --dataset data/dataset.jsonl --encoder avg --out runs/avg
//   iida eval --dataset data/dataset.jsonl --checkpoint runs/avg/checkpoint.json
//
// Any option can also come from --config FILE (TOML/INI; options of a
// command live in a section named after it). Command-line flags win.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "iida/cli/commands.h"
#include "json.hpp"

namespace {

using iida::cli::RunConfig;

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kMissingInput = 3 };

// One JSON object on one line, on stderr.
int Fail(const std::string& kind, const std::string& command, const std::string& message,
         int code) {
  nlohmann::ordered_json err;
  err["error"] = kind;
  err["command"] = command;
  err["message"] = message;
  std::cerr << err.dump() << std::endl;
  return code;
}

void AddCommon(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--seed", c.seed, "Root seed for every random stream")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

void AddModelInputs(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--dataset", c.dataset, "Dataset file (JSON lines)");
  cmd->add_option("--checkpoint", c.checkpoints, "Model checkpoint");
  cmd->add_option("--context-n", c.context_n,
                  "Context size (default: the checkpoint's training size)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implicit identification for dynamics adaptation: data, training, analysis"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  // Lets --config follow the command name.
  app.fallthrough();
  app.require_subcommand(1);
  RunConfig c;

  auto* gen = app.add_subcommand("gen-data", "Generate a dataset collection");
  gen->add_option("--family", c.family, "slidepuck | pushbox | multistep")->capture_default_str();
  gen->add_option("--train-envs", c.train_envs, "Train environments (default per family)");
  gen->add_option("--val-envs", c.val_envs, "Validation environments");
  gen->add_option("--test-envs", c.test_envs, "Test environments");
  gen->add_option("--actions", c.actions, "Transitions per environment");
  AddCommon(gen, c);

  auto* train = app.add_subcommand("train", "Train a model; writes checkpoint and loss log");
  train->add_option("--dataset", c.dataset, "Dataset file (JSON lines)");
  train->add_option("--encoder", c.encoder, "none | avg | rnn | tfm | explicit")
      ->capture_default_str();
  train->add_option("--context-n", c.context_n, "Training context size (default 8)");
  train->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  AddCommon(train, c);

  auto* eval = app.add_subcommand("eval", "Per-split prediction MSE");
  AddModelInputs(eval, c);
  AddCommon(eval, c);

  auto* sweep = app.add_subcommand("sweep", "MSE as a function of context size");
  AddModelInputs(sweep, c);
  sweep->add_option("--sizes", c.sizes, "Context sizes")->delimiter(',')->capture_default_str();
  sweep->add_option("--split", c.split, "train | val | test")->capture_default_str();
  sweep->add_option("--eval-seeds", c.eval_seeds, "Evaluation seeds per size")
      ->capture_default_str();
  AddCommon(sweep, c);

  auto* consistency =
      app.add_subcommand("consistency", "Latent export, self-consistency and PCA projection");
  AddModelInputs(consistency, c);
  consistency->add_option("--split", c.split, "train | val | test")->capture_default_str();
  consistency->add_option("--envs", c.envs, "Environments in the bank")->capture_default_str();
  consistency->add_option("--subsamples", c.subsamples, "Latents per environment")
      ->capture_default_str();
  AddCommon(consistency, c);

  auto* slide = app.add_subcommand("slide", "Goal reaching with CEM on fixed recorded goals");
  AddModelInputs(slide, c);
  slide->add_option("--envs", c.envs, "Test environments")->capture_default_str();
  slide->add_option("--goals", c.goals, "Goals per environment")->capture_default_str();
  slide->add_option("--population", c.population, "CEM population")->capture_default_str();
  slide->add_option("--elite-fraction", c.elite_fraction, "CEM elite fraction")
      ->capture_default_str();
  slide->add_option("--iterations", c.iterations, "CEM iterations")->capture_default_str();
  slide->add_option("--max-retries", c.max_retries, "CEM retries")->capture_default_str();
  AddCommon(slide, c);

  auto* table1 = app.add_subcommand("table1", "Test MSE, every encoder x seeds, mean ± std");
  table1->add_option("--dataset", c.datasets, "Dataset file, one per family row");
  table1->add_option("--encoder", c.encoders, "Encoders (columns)")->delimiter(',');
  table1->add_option("--context-n", c.context_n, "Training context size (default 8)");
  table1->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  table1->add_option("--seeds", c.seeds, "Seeds per cell")->capture_default_str();
  AddCommon(table1, c);

  std::string command = "iida";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();
    return Fail("usage", command, e.what(), kUsage);
  }
  command = app.get_subcommands().front()->get_name();

  try {
    std::vector<std::string> written;
    if (command == "gen-data") written = iida::cli::GenData(c);
    if (command == "train") written = iida::cli::TrainModel(c);
    if (command == "eval") written = iida::cli::Eval(c);
    if (command == "sweep") written = iida::cli::Sweep(c);
    if (command == "consistency") written = iida::cli::Consistency(c);
    if (command == "slide") written = iida::cli::Slide(c);
    if (command == "table1") written = iida::cli::Table1(c);
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    return kOk;
  } catch (const iida::cli::MissingInput& e) {
    return Fail("missing_input", command, e.what(), kMissingInput);
  } catch (const std::invalid_argument& e) {
    return Fail("invalid_argument", command, e.what(), kUsage);
  } catch (const std::exception& e) {
    return Fail("runtime_error", command, e.what(), kRuntime);
  }
}
