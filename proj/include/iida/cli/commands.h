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

#ifndef IIDA_CLI_COMMANDS_H_
#define IIDA_CLI_COMMANDS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace iida::cli {

// A required file or flag is absent.
class MissingInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every field has a fixed default; nothing depends on the clock.
struct RunConfig {
  std::string family = "slidepuck";
  std::string encoder = "avg";
  std::uint64_t seed = 0;
  int context_n = -1;  // -1: 8 for training, the checkpoint's size otherwise
  int epochs = 20;
  std::string out = ".";
  std::string dataset;
  std::vector<std::string> checkpoints;

  // gen-data; -1 selects the family default.
  int train_envs = -1;
  int val_envs = -1;
  int test_envs = -1;
  int actions = -1;

  std::string split = "test";
  std::vector<int> sizes = {0, 2, 4, 8, 16};
  int eval_seeds = 3;

  int envs = 10;  // consistency and slide use the first `envs` test environments
  int subsamples = 20;

  int goals = 20;
  int population = 256;
  double elite_fraction = 0.1;
  int iterations = 10;
  int max_retries = 3;

  std::vector<std::string> encoders = {"none", "avg", "rnn", "tfm", "explicit"};
  std::vector<std::string> datasets;  // table1: one row per dataset
  int seeds = 3;
};

// Each writes its artifacts under config.out and returns the written paths.
std::vector<std::string> GenData(const RunConfig& config);
std::vector<std::string> TrainModel(const RunConfig& config);
std::vector<std::string> Eval(const RunConfig& config);
std::vector<std::string> Sweep(const RunConfig& config);
std::vector<std::string> Consistency(const RunConfig& config);
std::vector<std::string> Slide(const RunConfig& config);
std::vector<std::string> Table1(const RunConfig& config);

// Full-size defaults for gen-data.
struct FamilyDefaults {
  int train_envs, val_envs, test_envs, actions;
};
FamilyDefaults DefaultsFor(const std::string& family);

}  // namespace iida::cli

#endif  // IIDA_CLI_COMMANDS_H_
