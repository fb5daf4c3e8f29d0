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

#ifndef IIDA_ANALYSIS_ANALYSIS_H_
#define IIDA_ANALYSIS_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "iida/datastore/dataset.h"
#include "iida/model/model.h"

namespace iida::analysis {

using model::Latent;

struct SweepRow {
  int context_n = 0;
  double mse_mean = 0.0;
  double mse_std = 0.0;  // population std over evaluation seeds
  std::vector<double> per_seed;
};

// evaluate-mse at each size, averaged over `eval_seeds` seeds derived from
// `seed`.
std::vector<SweepRow> ContextSweep(const model::Model& model,
                                   const data::DatasetCollection& collection, data::Split split,
                                   const std::vector<int>& sizes, std::uint64_t seed,
                                   int eval_seeds = 3);
// CSV: context_n,mse_mean,mse_std
std::string SweepCsv(const std::vector<SweepRow>& rows);

struct LatentBank {
  int context_n = 0;
  std::vector<int> env_ids;    // per latent
  std::vector<int> subsample;  // per latent
  std::vector<Latent> latents;

  std::size_t size() const { return latents.size(); }
  int num_envs() const;
};

// `subsamples` latents per environment of the split, each from an
// independently drawn context of size context_n. max_envs > 0 keeps only the
// first environments of the split.
LatentBank BuildLatentBank(const model::Model& model, const data::DatasetCollection& collection,
                           data::Split split, int context_n, std::uint64_t seed,
                           int subsamples = 20, int max_envs = 0);

// Fraction of latents whose nearest other latent (Euclidean, ties to the
// lowest index) comes from the same environment. Throws with fewer than two
// latents.
double SelfConsistency(const LatentBank& bank);
// Chance of naming the right environment by guessing: 1 / environments.
double RandomBaseline(const LatentBank& bank);

// CSV: env_id,subsample,z1..zK
std::string LatentCsv(const LatentBank& bank);
void WriteLatentCsv(const LatentBank& bank, const std::filesystem::path& path);
LatentBank ReadLatentCsv(const std::filesystem::path& path, int context_n);

struct Projection {
  std::vector<std::array<double, 2>> coords;
  std::array<double, 2> eigenvalues{};
  // Share of total variance captured by the two components.
  double variance_explained = 0.0;
};

// Top-2 principal components of the centered latents. Each axis is signed so
// its largest-magnitude loading is positive.
Projection ProjectPca(const std::vector<Latent>& latents);
// CSV: env_id,subsample,pc1,pc2,variance_explained (constant column).
std::string ProjectionCsv(const LatentBank& bank, const Projection& projection);

}  // namespace iida::analysis

#endif  // IIDA_ANALYSIS_ANALYSIS_H_
