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

#ifndef IIDA_DATASTORE_DATASET_H_
#define IIDA_DATASTORE_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iida/common/random.h"
#include "iida/envsim/family.h"

namespace iida::data {

using envsim::EnvParams;
using envsim::Family;
using envsim::Transition;

enum class Split { kTrain, kVal, kTest };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);  // "train" | "val" | "test"

// Each factor's range cut into 30 equal ribbons; 24 go to train and 3 each to
// val and test, chosen by a seeded shuffle.
struct RibbonSplit {
  static constexpr int kRibbons = 30;
  static constexpr int kTrainRibbons = 24;
  static constexpr int kValRibbons = 3;

  std::vector<std::array<Split, kRibbons>> assignment;  // [factor][ribbon]

  static RibbonSplit Make(const Family& family, std::uint64_t seed);

  std::vector<int> Ribbons(std::size_t factor, Split split) const;
  // Ribbon whose open interior contains `value`, or -1 (outside the range or
  // exactly on a ribbon edge).
  static int RibbonOf(const envsim::Factor& factor, double value);
  static std::pair<double, double> Bounds(const envsim::Factor& factor, int ribbon);
  // True if every factor value lies inside a ribbon assigned to `split`.
  bool Contains(const Family& family, const EnvParams& params, Split split) const;

  bool operator==(const RibbonSplit&) const = default;
};

struct SplitCounts {
  int train = 1;
  int val = 1;
  int test = 1;
};

struct LabeledParams {
  EnvParams params;
  Split split = Split::kTrain;
};

// Environments ordered train, val, test. Each factor is drawn uniformly
// inside a uniformly chosen ribbon of the environment's split.
std::vector<LabeledParams> SampleEnvironments(const Family& family, const RibbonSplit& ribbons,
                                              const SplitCounts& counts, std::uint64_t seed);

struct EnvDataset {
  int env_id = -1;
  Split split = Split::kTrain;
  EnvParams params;  // hidden ground truth
  std::vector<Transition> transitions;
  bool operator==(const EnvDataset&) const = default;
};

// n transitions. Single-step families draw random valid start states and
// actions; multi-step families relabel base rollouts collected under the
// family's nominal parameters.
EnvDataset GenerateDataset(const Family& family, const EnvParams& params, int env_id, Split split,
                           int n, std::uint64_t seed);

struct DatasetCollection {
  std::string family;
  std::uint64_t seed = 0;
  RibbonSplit ribbons;
  std::vector<EnvDataset> envs;

  const Family& family_ref() const { return envsim::FamilyByName(family); }
  std::vector<const EnvDataset*> Select(Split split) const;
  const EnvDataset& Env(int env_id) const;
  bool operator==(const DatasetCollection&) const = default;
};

DatasetCollection GenerateCollection(const Family& family, const SplitCounts& counts,
                                     int actions_per_env, std::uint64_t seed);

// The same environments recorded with a different number of transitions.
// With `only`, environments of other splits are copied unchanged. Per-environment streams match
// GenerateCollection, so for single-step families the first transitions
// coincide with the original recording.
DatasetCollection Rerecord(const DatasetCollection& collection, int actions_per_env,
                           std::optional<Split> only = std::nullopt);

// Transitions drawn from one environment, used as evidence about it.
struct ContextSet {
  std::vector<Transition> points;
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// N points drawn uniformly without replacement from the dataset minus the
// excluded target; if fewer than N remain they are drawn with replacement.
// An empty remainder yields an empty (no-context) set.
ContextSet SampleContext(const EnvDataset& dataset, int n, std::optional<std::size_t> exclude,
                         Rng& rng);
ContextSet SampleContext(const EnvDataset& dataset, int n, std::optional<std::size_t> exclude,
                         std::uint64_t seed);

// JSON-lines file: a header record then one record per environment.
//   {"record":"header","format":"iida-dataset","version":1,"family":...,
//    "state_width":..,"action_width":..,"seed":..,"factors":[...],
//    "ribbons":{factor:[split x30]}}
//   {"record":"env","env_id":..,"split":..,"family":..,"params":{name:value},
//    "transitions":[[s..., a..., s'...], ...]}
// Numbers use shortest round-trip formatting, so Load(Save(x)) == x and equal
// collections produce identical bytes.
void Save(const DatasetCollection& collection, const std::filesystem::path& path);
std::string Serialize(const DatasetCollection& collection);
DatasetCollection Load(const std::filesystem::path& path);
DatasetCollection Parse(std::string_view text);

// Thrown by Load/Parse; the message names the record index.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iida::data

#endif  // IIDA_DATASTORE_DATASET_H_
