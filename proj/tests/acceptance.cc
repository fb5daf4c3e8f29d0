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

// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.
//
//   acceptance <path-to-iida-binary> <scratch-dir> [criterion ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.h"
#include "iida/analysis/analysis.h"
#include "iida/cli/commands.h"
#include "iida/common/random.h"
#include "iida/common/text.h"
#include "iida/datastore/dataset.h"
#include "iida/envsim/family.h"
#include "iida/envsim/physics.h"
#include "iida/model/evaluate.h"
#include "iida/model/model.h"
#include "iida/model/train.h"
#include "iida/nets/blocks.h"
#include "iida/numcore/ops.h"
#include "oracles.h"
#include "toy_family.h"

namespace iida {
namespace {

namespace fs = std::filesystem;
namespace nc = numcore;

using data::Split;
using envsim::EnvParams;
using envsim::Vec;
using model::EncoderKind;
using model::Latent;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

EnvParams RandomParams(const envsim::Family& family, Rng& rng) {
  EnvParams p;
  for (const auto& f : family.factors()) p.values.push_back(Uniform(rng, f.low, f.high));
  return p;
}

// 1. Gradients ---------------------------------------------------------------

nc::Tensor RandomConstant(nc::Shape shape, Rng& rng) {
  std::vector<double> v(nc::NumElements(shape));
  for (double& x : v) x = Uniform(rng, -1.0, 1.0);
  return nc::Tensor::Constant(std::move(shape), std::move(v));
}

void Perturb(nc::ParameterStore& store, Rng& rng) {
  for (auto& t : store.tensors()) {
    for (double& v : t.mutable_values()) v += Uniform(rng, -0.3, 0.3);
  }
}

Verdict GradientSuite() {
  std::size_t coordinates = 0, passed = 0;
  double worst = 0.0;
  int blocks = 0;
  auto add = [&](const testing::GradCheckResult& r) {
    coordinates += r.coordinates;
    passed += r.passed;
    worst = std::max(worst, r.worst_relative_error);
    ++blocks;
  };
  Rng rng(2026);
  auto dim = [&](int lo, int hi) { return lo + static_cast<int>(UniformIndex(rng, hi - lo + 1)); };
  for (int trial = 0; trial < 30; ++trial) {
    const int batch = dim(1, 3), set = dim(1, 4);
    if (trial % 3 == 0) {
      nc::ParameterStore store;
      const auto act = trial % 2 ? nets::Activation::kTanh : nets::Activation::kRelu;
      const int in = dim(1, 4), out = dim(1, 3);
      nets::Mlp mlp(
          {.input_dim = in, .hidden_dims = {dim(1, 5)}, .output_dim = out, .activation = act},
          store, "mlp", rng);
      if (store.TotalSize() > 64) continue;
      Perturb(store, rng);
      nc::Tensor x = RandomConstant({batch, in}, rng), y = RandomConstant({batch, out}, rng);
      add(testing::CheckGradients([&] { return nc::SquaredError(mlp.Forward(x), y); },
                                  store.tensors()));
    } else if (trial % 3 == 1) {
      nc::ParameterStore store;
      const int in = dim(1, 2), out = dim(1, 2);
      nets::Lstm lstm(
          {.input_dim = in, .hidden_size = dim(1, 2), .num_layers = dim(1, 2), .output_dim = out},
          store, "lstm", rng);
      if (store.TotalSize() > 64) continue;
      Perturb(store, rng);
      nc::Tensor seq = RandomConstant({batch, set, in}, rng), y = RandomConstant({batch, out}, rng);
      add(testing::CheckGradients([&] { return nc::SquaredError(lstm.Forward(seq), y); },
                                  store.tensors()));
    } else {
      nc::ParameterStore store;
      const int heads = dim(1, 2), in = dim(1, 2), out = dim(1, 2);
      nets::SetAttention attn({.input_dim = in,
                               .model_width = heads * dim(1, 2),
                               .num_heads = heads,
                               .output_dim = out},
                              store, "attn", rng);
      if (store.TotalSize() > 64) continue;
      Perturb(store, rng);
      nc::Tensor x = RandomConstant({batch, set, in}, rng), y = RandomConstant({batch, out}, rng);
      add(testing::CheckGradients([&] { return nc::SquaredError(attn.Forward(x), y); },
                                  store.tensors()));
    }
  }
  const double fraction = coordinates ? static_cast<double>(passed) / coordinates : 0.0;
  return {blocks >= 20 && fraction >= 0.99,
          Fmt("%.0f blocks, %.2f%% of %.0f coordinates rel err < 1e-4", blocks, 100.0 * fraction,
              static_cast<double>(coordinates))};
}

// 2. Physics -----------------------------------------------------------------

Verdict PhysicsOracle() {
  const envsim::Family& family = envsim::FamilyByName("slidepuck");
  Rng rng(7);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const EnvParams params = RandomParams(family, rng);
    const Vec start = family.SampleState(rng);
    const Vec a = family.SampleAction(rng);
    const Vec end = family.Step(params, start, a);
    const auto euler = testing::EulerSlide(envsim::slide_puck::FromParams(params),
                                           {start[0], start[1]}, a[0], a[1]);
    worst = std::max(worst, std::hypot(end[0] - euler[0], end[1] - euler[1]));
  }
  envsim::slide_puck::Physics p{.mass = 0.2, .floor_friction = 0.04, .puck_friction = 0.06};
  const double speed = 1.2;
  const auto end = envsim::slide_puck::Simulate(p, {0.0, 0.0}, 0.7, speed);
  const double closed_form = speed * speed / (2.0 * 0.1 * 9.81);
  const double friction_err = std::abs(std::hypot(end[0], end[1]) - closed_form);
  return {worst < 1e-3 && friction_err < 1e-3,
          Fmt("max RK4-Euler gap %.2e m over 100 draws, friction-only error %.2e m", worst,
              friction_err)};
}

// Slide-puck runs shared by criteria 3, 5, 6 and 7 --------------------------

struct SeedRun {
  std::uint64_t seed = 0;
  data::DatasetCollection collection;
  std::map<EncoderKind, double> test_mse;
  std::optional<model::Model> dr;
  std::optional<model::Model> avg4;  // IIDA-avg trained at N = 4
};

model::Model TrainPuck(const data::DatasetCollection& c, EncoderKind kind, int context_n,
                       std::uint64_t seed) {
  model::ModelSpec spec = model::DefaultSpec(c.family_ref(), kind);
  spec.context_n = context_n;
  model::Model m(spec, DeriveSeed(seed, "train/init"));
  model::TrainConfig config;
  config.epochs = 20;
  config.seed = DeriveSeed(seed, "train/loop");
  model::Train(m, c, config);
  return m;
}

std::vector<SeedRun>& PuckRuns() {
  static std::vector<SeedRun> runs = [] {
    std::vector<SeedRun> out;
    const envsim::Family& family = envsim::FamilyByName("slidepuck");
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto start = std::chrono::steady_clock::now();
      SeedRun run;
      run.seed = seed;
      run.collection = data::GenerateCollection(family, {1000, 100, 100}, 10, seed);
      const auto& c = run.collection;
      const std::uint64_t eval_seed = DeriveSeed(seed, "eval");
      for (EncoderKind kind : {EncoderKind::kNone, EncoderKind::kAvg, EncoderKind::kExplicit}) {
        model::Model m = TrainPuck(c, kind, 8, seed);
        run.test_mse[kind] = model::EvaluateMse(m, c, Split::kTest, 8, eval_seed);
        if (kind == EncoderKind::kNone) run.dr.emplace(std::move(m));
      }
      run.avg4.emplace(TrainPuck(c, EncoderKind::kAvg, 4, seed));
      std::printf("  seed %d trained in %.0f s\n", static_cast<int>(seed), Seconds(start));
      std::fflush(stdout);
      out.push_back(std::move(run));
    }
    return out;
  }();
  return runs;
}

// 3. Baseline ordering -------------------------------------------------------

Verdict BaselineOrdering() {
  bool pass = true;
  std::string detail;
  for (const SeedRun& run : PuckRuns()) {
    const double dr = run.test_mse.at(EncoderKind::kNone);
    const double avg = run.test_mse.at(EncoderKind::kAvg);
    const double expl = run.test_mse.at(EncoderKind::kExplicit);
    pass = pass && avg < 0.6 * dr && expl < dr;
    detail += Fmt("seed %.0f: dr %.4g avg %.4g explicit %.4g; ", static_cast<double>(run.seed), dr,
                  avg, expl);
  }
  return {pass, detail};
}

// 4. Two-environment linear family ------------------------------------------

Verdict ContextSensitivity() {
  const auto c = testing::LinearToyCollection(64, 0.5, 1.5, 11);
  model::TrainConfig config;
  config.epochs = 400;
  config.steps_per_epoch = 100;
  config.seed = 4;
  config.keep_best = false;
  config.final_learning_rate = 1e-4;
  model::Model iida(testing::LinearToySpec(EncoderKind::kAvg, 32), 3);
  model::Train(iida, c, config);
  const double iida_loss = model::EvaluateMse(iida, c, Split::kTrain, 4, 9);

  config.epochs = 40;
  model::Model dr(testing::LinearToySpec(EncoderKind::kNone, 32), 3);
  model::Train(dr, c, config);
  const double dr_loss = model::EvaluateMse(dr, c, Split::kTrain, 0, 9);
  // Both train envs share inputs; the best context-free prediction is the
  // mean coefficient times (s + a), leaving 0.25 (s + a)^2 per point.
  double optimum = 0.0;
  for (const auto& t : c.envs[0].transitions) {
    const double x = t.s[0] + t.a[0];
    optimum += 0.25 * x * x;
  }
  optimum /= static_cast<double>(c.envs[0].transitions.size());
  const double gap = std::abs(dr_loss - optimum) / optimum;
  return {iida_loss < 1e-6 && gap <= 0.1,
          Fmt("iida train mse %.3e, dr %.5g vs optimum %.5g (%.2f%%)", iida_loss, dr_loss, optimum,
              100.0 * gap)};
}

// 5. Context sweep -----------------------------------------------------------

Verdict ContextSweep() {
  int monotone = 0;
  std::string detail;
  for (const SeedRun& run : PuckRuns()) {
    // 40 recorded transitions per held-out environment so that N = 16
    // contexts are drawn without replacement.
    const auto wide = data::Rerecord(run.collection, 40, Split::kTest);
    const auto rows = analysis::ContextSweep(*run.avg4, wide, Split::kTest, {2, 4, 8, 16},
                                             DeriveSeed(run.seed, "sweep"));
    bool ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ok = ok && rows[i].mse_mean <= 1.05 * rows[i - 1].mse_mean;
    }
    monotone += ok;
    detail += Fmt("seed %.0f:", static_cast<double>(run.seed));
    for (const auto& r : rows) detail += Fmt(" %.4g", r.mse_mean);
    detail += ok ? " (ok); " : " (rises); ";
  }
  return {monotone >= 2, Fmt("%.0f/3 seeds non-increasing; ", monotone) + detail};
}

// 6. Self-consistency --------------------------------------------------------

Verdict SelfConsistency() {
  bool pass = true;
  std::string detail;
  for (const SeedRun& run : PuckRuns()) {
    const auto bank = analysis::BuildLatentBank(*run.avg4, run.collection, Split::kTest, 4,
                                                DeriveSeed(run.seed, "consistency"), 20, 10);
    const double score = analysis::SelfConsistency(bank);
    const double baseline = analysis::RandomBaseline(bank);
    pass = pass && bank.num_envs() == 10 && score >= 3.0 * baseline;
    detail +=
        Fmt("seed %.0f: %.3f vs baseline %.3f; ", static_cast<double>(run.seed), score, baseline);
  }
  analysis::LatentBank clusters;
  clusters.context_n = 4;
  for (int e = 0; e < 10; ++e) {
    for (int k = 0; k < 20; ++k) {
      Latent z(8, 0.0);
      z[e % 8] = 100.0 * (1 + e / 8);
      z[(e + 1) % 8] += 1e-3 * k;
      clusters.env_ids.push_back(e);
      clusters.subsample.push_back(k);
      clusters.latents.push_back(z);
    }
  }
  const double degenerate = analysis::SelfConsistency(clusters);
  pass = pass && degenerate == 1.0;
  return {pass, detail + Fmt("separated clusters %.3f", degenerate)};
}

// 7. Goal reaching -----------------------------------------------------------

Verdict GoalReaching(const fs::path& scratch) {
  const SeedRun& run = PuckRuns().front();
  const fs::path dir = scratch / "slide";
  fs::create_directories(dir);
  // 30 recordings per held-out env: the original 10 serve as context, the
  // 20 new ones are the fixed goals.
  data::Save(data::Rerecord(run.collection, 30, Split::kTest), dir / "dataset.jsonl");
  run.avg4->Save(dir / "avg.json");
  run.dr->Save(dir / "dr.json");
  cli::RunConfig config;
  config.dataset = (dir / "dataset.jsonl").string();
  config.checkpoints = {(dir / "avg.json").string(), (dir / "dr.json").string()};
  config.seed = run.seed;
  config.envs = 10;
  config.goals = 20;
  config.out = dir.string();
  cli::Slide(config);

  const CsvTable summary = ReadCsv(dir / "slide_summary.csv");
  std::map<std::string, double> rate;
  int goals = 0;
  for (const auto& row : summary.rows) {
    rate[row[summary.Column("model")]] = std::stod(row[summary.Column("success_rate")]);
    goals = std::stoi(row[summary.Column("goals")]);
  }
  return {goals == 200 && rate["avg"] > rate["none"] && rate["oracle"] >= 0.95,
          Fmt("%.0f goals: iida %.3f, dr %.3f, oracle %.3f", goals, rate["avg"], rate["none"],
              rate["oracle"])};
}

// 8. Permutation invariance --------------------------------------------------

double MaxAbsDiff(const Latent& a, const Latent& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Verdict PermutationInvariance() {
  const envsim::Family& family = envsim::FamilyByName("slidepuck");
  model::Model avg(model::DefaultSpec(family, EncoderKind::kAvg), 1);
  model::Model tfm(model::DefaultSpec(family, EncoderKind::kTfm), 1);
  model::Model rnn(model::DefaultSpec(family, EncoderKind::kRnn), 1);
  Rng rng(99);
  double avg_gap = 0.0, tfm_gap = 0.0, rnn_gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const EnvParams params = RandomParams(family, rng);
    const int n = 2 + trial % 15;
    const auto env = data::GenerateDataset(family, params, trial, Split::kTest, n,
                                           DeriveSeed(99, static_cast<std::uint64_t>(trial)));
    data::ContextSet context{env.transitions};
    data::ContextSet shuffled = context;
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    if (shuffled.points == context.points)
      std::reverse(shuffled.points.begin(), shuffled.points.end());
    avg_gap = std::max(avg_gap, MaxAbsDiff(avg.Encode(context), avg.Encode(shuffled)));
    tfm_gap = std::max(tfm_gap, MaxAbsDiff(tfm.Encode(context), tfm.Encode(shuffled)));
    rnn_gap = std::max(rnn_gap, MaxAbsDiff(rnn.Encode(context), rnn.Encode(shuffled)));
  }
  return {avg_gap <= 1e-12 && tfm_gap <= 1e-9 && rnn_gap > 1e-9,
          Fmt("max latent change: avg %.2e, tfm %.2e, rnn %.2e", avg_gap, tfm_gap, rnn_gap)};
}

// 9. CLI reproducibility ------------------------------------------------------

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs every command once into `root`; returns the commands that failed.
std::vector<std::string> RunAllCommands(const std::string& cli, const fs::path& root) {
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string r = root.string();
  {
    std::ofstream cfg(root / "train.toml");
    cfg << "[train]\nencoder = \"avg\"\nepochs = 2\ncontext-n = 3\n";
  }
  const std::string data = r + "/data/dataset.jsonl";
  const std::string ckpt = r + "/train/checkpoint.json";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen-data",
       "gen-data --family slidepuck --seed 5 --train-envs 6 --val-envs 2 "
       "--test-envs 3 --actions 8 --out " +
           r + "/data"},
      {"train",
       "train --config " + r + "/train.toml --dataset " + data + " --seed 5 --out " + r + "/train"},
      {"eval",
       "eval --dataset " + data + " --checkpoint " + ckpt + " --seed 5 --out " + r + "/eval"},
      {"sweep", "sweep --dataset " + data + " --checkpoint " + ckpt +
                    " --sizes 0,2,4 --eval-seeds 2 --seed 5 --out " + r + "/sweep"},
      {"consistency", "consistency --dataset " + data + " --checkpoint " + ckpt +
                          " --envs 3 --subsamples 4 --seed 5 --out " + r + "/consistency"},
      {"slide", "slide --dataset " + data + " --checkpoint " + ckpt +
                    " --envs 2 --goals 3 --population 32 --iterations 3 --seed 5 --out " + r +
                    "/slide"},
      {"table1", "table1 --dataset " + data +
                     " --encoder none,avg --epochs 1 --seeds 2 "
                     "--seed 5 --out " +
                     r + "/table1"},
  };
  std::vector<std::string> failed;
  for (const auto& [name, args] : commands) {
    const std::string line = "\"" + cli + "\" " + args + " > \"" + r + "/" + name + ".log\" 2>&1";
    if (std::system(line.c_str()) != 0) failed.push_back(name);
  }
  return failed;
}

std::map<std::string, std::string> Outputs(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".csv" && ext != ".json" && ext != ".jsonl") continue;
    files[fs::relative(entry.path(), root).string()] = Slurp(entry.path());
  }
  return files;
}

Verdict CliReproducibility(const std::string& cli, const fs::path& scratch) {
  const auto failed_a = RunAllCommands(cli, scratch / "cli_a");
  const auto failed_b = RunAllCommands(cli, scratch / "cli_b");
  if (!failed_a.empty() || !failed_b.empty()) {
    std::string names;
    for (const auto& n : failed_a) names += n + " ";
    return {false, "commands failed: " + names};
  }
  // Paths inside the outputs differ only by the run directory, which never
  // appears in the files.
  const auto a = Outputs(scratch / "cli_a"), b = Outputs(scratch / "cli_b");
  std::set<std::string> dirs;
  std::string mismatched;
  for (const auto& [path, bytes] : a) {
    dirs.insert(fs::path(path).parent_path().string());
    auto it = b.find(path);
    if (it == b.end() || it->second != bytes) mismatched += path + " ";
  }
  if (a.size() != b.size()) mismatched += "(file sets differ)";
  return {mismatched.empty() && dirs.size() == 7,
          Fmt("%.0f files from %.0f commands compared", static_cast<double>(a.size()),
              static_cast<double>(dirs.size())) +
              (mismatched.empty() ? ", all identical" : ", differing: " + mismatched)};
}

}  // namespace
}  // namespace iida

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <iida-binary> <scratch-dir> [criterion ...]\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path scratch = argv[2];
  std::set<int> only;
  for (int i = 3; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<iida::Verdict()>>> criteria = {
      {"gradient suite", iida::GradientSuite},
      {"physics oracle", iida::PhysicsOracle},
      {"baseline ordering", iida::BaselineOrdering},
      {"context sensitivity", iida::ContextSensitivity},
      {"context sweep", iida::ContextSweep},
      {"self-consistency", iida::SelfConsistency},
      {"goal reaching", [&] { return iida::GoalReaching(scratch); }},
      {"permutation invariance", iida::PermutationInvariance},
      {"cli reproducibility", [&] { return iida::CliReproducibility(cli, scratch); }},
  };
  // The same lines are kept in <scratch-dir>/report.txt.
  std::filesystem::create_directories(scratch);
  std::ofstream report(scratch / "report.txt");
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(number)) continue;
    const auto start = std::chrono::steady_clock::now();
    iida::Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    char line[2048];
    std::snprintf(line, sizeof(line), "%s %d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", number,
                  criteria[i].first.c_str(), v.detail.c_str(), iida::Seconds(start));
    std::fputs(line, stdout);
    report << line << std::flush;
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
