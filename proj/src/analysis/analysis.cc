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

#include "iida/analysis/analysis.h"

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>

#include "iida/common/text.h"
#include "iida/model/evaluate.h"

namespace iida::analysis {

std::vector<SweepRow> ContextSweep(const model::Model& model,
                                   const data::DatasetCollection& collection, data::Split split,
                                   const std::vector<int>& sizes, std::uint64_t seed,
                                   int eval_seeds) {
  if (eval_seeds < 1) throw std::invalid_argument("sweep: need at least one evaluation seed");
  std::vector<SweepRow> rows;
  for (int n : sizes) {
    if (n < 0) throw std::invalid_argument("sweep: context size must be >= 0");
    SweepRow row;
    row.context_n = n;
    for (int k = 0; k < eval_seeds; ++k) {
      const std::uint64_t s =
          DeriveSeed(DeriveSeed(seed, "sweep/eval"), static_cast<std::uint64_t>(k));
      row.per_seed.push_back(model::EvaluateMse(model, collection, split, n, s));
    }
    for (double v : row.per_seed) row.mse_mean += v;
    row.mse_mean /= eval_seeds;
    for (double v : row.per_seed) row.mse_std += (v - row.mse_mean) * (v - row.mse_mean);
    row.mse_std = std::sqrt(row.mse_std / eval_seeds);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  CsvWriter csv({"context_n", "mse_mean", "mse_std"});
  for (const auto& r : rows) {
    csv.AddRow({std::to_string(r.context_n), FormatDouble(r.mse_mean), FormatDouble(r.mse_std)});
  }
  return csv.ToString();
}

int LatentBank::num_envs() const {
  return static_cast<int>(std::set<int>(env_ids.begin(), env_ids.end()).size());
}

LatentBank BuildLatentBank(const model::Model& model, const data::DatasetCollection& collection,
                           data::Split split, int context_n, std::uint64_t seed, int subsamples,
                           int max_envs) {
  if (!model.spec().uses_context()) {
    throw std::invalid_argument("latent bank: encoder '" +
                                std::string(model::EncoderName(model.spec().encoder)) +
                                "' produces no latents");
  }
  if (subsamples < 1) throw std::invalid_argument("latent bank: need at least one subsample");
  auto envs = collection.Select(split);
  if (max_envs > 0 && static_cast<int>(envs.size()) > max_envs) envs.resize(max_envs);
  LatentBank bank;
  bank.context_n = context_n;
  const std::uint64_t root = DeriveSeed(seed, "latents/subsample");
  for (const data::EnvDataset* env : envs) {
    const std::uint64_t env_seed = DeriveSeed(root, static_cast<std::uint64_t>(env->env_id));
    std::vector<data::ContextSet> contexts;
    for (int k = 0; k < subsamples; ++k) {
      contexts.push_back(data::SampleContext(*env, context_n, std::nullopt,
                                             DeriveSeed(env_seed, static_cast<std::uint64_t>(k))));
    }
    std::vector<const data::ContextSet*> ptrs;
    for (const auto& c : contexts) ptrs.push_back(&c);
    numcore::NoGradGuard no_grad;
    const numcore::Tensor z = model.EncodeBatch(ptrs);
    const int width = z.dim(1);
    for (int k = 0; k < subsamples; ++k) {
      bank.env_ids.push_back(env->env_id);
      bank.subsample.push_back(k);
      bank.latents.emplace_back(z.values().begin() + k * width,
                                z.values().begin() + (k + 1) * width);
    }
  }
  return bank;
}

double SelfConsistency(const LatentBank& bank) {
  const std::size_t n = bank.size();
  if (n < 2) throw std::invalid_argument("self-consistency: need at least two latents");
  if (bank.env_ids.size() != n)
    throw std::invalid_argument("self-consistency: label count mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t nearest = n;
    double best = INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = 0.0;
      for (std::size_t k = 0; k < bank.latents[i].size(); ++k) {
        const double diff = bank.latents[i][k] - bank.latents[j][k];
        d += diff * diff;
      }
      // Strict comparison keeps the lowest index among ties.
      if (d < best || nearest == n) {
        best = d;
        nearest = j;
      }
    }
    hits += bank.env_ids[nearest] == bank.env_ids[i];
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double RandomBaseline(const LatentBank& bank) {
  const int envs = bank.num_envs();
  if (envs == 0) throw std::invalid_argument("random baseline: empty bank");
  return 1.0 / envs;
}

std::string LatentCsv(const LatentBank& bank) {
  const std::size_t width = bank.latents.empty() ? 0 : bank.latents[0].size();
  std::vector<std::string> header = {"env_id", "subsample"};
  for (std::size_t k = 1; k <= width; ++k) header.push_back("z" + std::to_string(k));
  CsvWriter csv(header);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    std::vector<std::string> row = {std::to_string(bank.env_ids[i]),
                                    std::to_string(bank.subsample[i])};
    for (double v : bank.latents[i]) row.push_back(FormatDouble(v));
    csv.AddRow(std::move(row));
  }
  return csv.ToString();
}

void WriteLatentCsv(const LatentBank& bank, const std::filesystem::path& path) {
  WriteTextFile(path, LatentCsv(bank));
}

LatentBank ReadLatentCsv(const std::filesystem::path& path, int context_n) {
  const CsvTable table = ReadCsv(path);
  if (table.Column("env_id") != 0 || table.Column("subsample") != 1 || table.header.size() < 3) {
    throw std::runtime_error("latent CSV " + path.string() +
                             ": expected columns env_id,subsample,z1..");
  }
  LatentBank bank;
  bank.context_n = context_n;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw std::runtime_error("latent CSV " + path.string() + ": row " + std::to_string(r + 1) +
                               " has " + std::to_string(row.size()) + " fields");
    }
    bank.env_ids.push_back(std::stoi(row[0]));
    bank.subsample.push_back(std::stoi(row[1]));
    Latent z;
    for (std::size_t k = 2; k < row.size(); ++k) z.push_back(std::stod(row[k]));
    bank.latents.push_back(std::move(z));
  }
  return bank;
}

Projection ProjectPca(const std::vector<Latent>& latents) {
  if (latents.size() < 2) throw std::invalid_argument("pca: need at least two latents");
  const int n = static_cast<int>(latents.size());
  const int d = static_cast<int>(latents[0].size());
  if (d < 2) throw std::invalid_argument("pca: latents must have at least two dimensions");
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(latents[i].size()) != d) {
      throw std::invalid_argument("pca: latents differ in width");
    }
    for (int k = 0; k < d; ++k) x(i, k) = latents[i][k];
  }
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigenvalues ascend; the last two columns are the principal axes.
  Eigen::MatrixXd axes(d, 2);
  Projection p;
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - c);
    Eigen::Index largest;
    v.cwiseAbs().maxCoeff(&largest);
    if (v(largest) < 0) v = -v;
    axes.col(c) = v;
    p.eigenvalues[c] = std::max(0.0, solver.eigenvalues()(d - 1 - c));
  }
  const double total = std::max(0.0, solver.eigenvalues().sum());
  p.variance_explained = total > 0.0 ? (p.eigenvalues[0] + p.eigenvalues[1]) / total : 1.0;
  const Eigen::MatrixXd coords = x * axes;
  for (int i = 0; i < n; ++i) p.coords.push_back({coords(i, 0), coords(i, 1)});
  return p;
}

std::string ProjectionCsv(const LatentBank& bank, const Projection& projection) {
  CsvWriter csv({"env_id", "subsample", "pc1", "pc2", "variance_explained"});
  for (std::size_t i = 0; i < bank.size(); ++i) {
    csv.AddRow({std::to_string(bank.env_ids[i]), std::to_string(bank.subsample[i]),
                FormatDouble(projection.coords[i][0]), FormatDouble(projection.coords[i][1]),
                FormatDouble(projection.variance_explained)});
  }
  return csv.ToString();
}

}  // namespace iida::analysis
