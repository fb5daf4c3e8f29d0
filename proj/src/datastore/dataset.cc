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

#include "iida/datastore/dataset.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "iida/envsim/physics.h"
#include "json.hpp"

namespace iida::data {

using Json = nlohmann::ordered_json;

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + std::string(name) +
                              "'; expected train, val or test");
}

RibbonSplit RibbonSplit::Make(const Family& family, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, "ribbons"));
  RibbonSplit out;
  for (std::size_t f = 0; f < family.num_factors(); ++f) {
    std::array<int, kRibbons> order;
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::array<Split, kRibbons> labels;
    for (int i = 0; i < kRibbons; ++i) {
      labels[order[i]] = i < kTrainRibbons                 ? Split::kTrain
                         : i < kTrainRibbons + kValRibbons ? Split::kVal
                                                           : Split::kTest;
    }
    out.assignment.push_back(labels);
  }
  return out;
}

std::vector<int> RibbonSplit::Ribbons(std::size_t factor, Split split) const {
  std::vector<int> out;
  for (int r = 0; r < kRibbons; ++r) {
    if (assignment.at(factor)[r] == split) out.push_back(r);
  }
  return out;
}

std::pair<double, double> RibbonSplit::Bounds(const envsim::Factor& factor, int ribbon) {
  const double width = (factor.high - factor.low) / kRibbons;
  const double lo = factor.low + width * ribbon;
  const double hi = ribbon + 1 == kRibbons ? factor.high : factor.low + width * (ribbon + 1);
  return {lo, hi};
}

int RibbonSplit::RibbonOf(const envsim::Factor& factor, double value) {
  for (int r = 0; r < kRibbons; ++r) {
    auto [lo, hi] = Bounds(factor, r);
    if (value > lo && value < hi) return r;
  }
  return -1;
}

bool RibbonSplit::Contains(const Family& family, const EnvParams& params, Split split) const {
  const auto& factors = family.factors();
  if (params.values.size() != factors.size() || assignment.size() != factors.size()) return false;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const int r = RibbonOf(factors[f], params.values[f]);
    if (r < 0 || assignment[f][r] != split) return false;
  }
  return true;
}

std::vector<LabeledParams> SampleEnvironments(const Family& family, const RibbonSplit& ribbons,
                                              const SplitCounts& counts, std::uint64_t seed) {
  if (counts.train < 1 || counts.val < 1 || counts.test < 1) {
    throw std::invalid_argument("environment counts must be >= 1 per split");
  }
  Rng rng(DeriveSeed(seed, "environments"));
  std::vector<LabeledParams> out;
  auto draw = [&](Split split, int count) {
    std::vector<std::vector<int>> pools;
    for (std::size_t f = 0; f < family.num_factors(); ++f) {
      pools.push_back(ribbons.Ribbons(f, split));
    }
    for (int i = 0; i < count; ++i) {
      LabeledParams env;
      env.split = split;
      for (std::size_t f = 0; f < family.num_factors(); ++f) {
        const int ribbon = pools[f][UniformIndex(rng, pools[f].size())];
        auto [lo, hi] = RibbonSplit::Bounds(family.factors()[f], ribbon);
        env.params.values.push_back(UniformOpen(rng, lo, hi));
      }
      out.push_back(std::move(env));
    }
  };
  draw(Split::kTrain, counts.train);
  draw(Split::kVal, counts.val);
  draw(Split::kTest, counts.test);
  return out;
}

EnvDataset GenerateDataset(const Family& family, const EnvParams& params, int env_id, Split split,
                           int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("dataset size must be >= 1");
  Rng rng(seed);
  EnvDataset out{env_id, split, params, {}};
  if (family.multi_step()) {
    std::vector<envsim::StateAction> pairs;
    const EnvParams nominal = family.Nominal();
    while (static_cast<int>(pairs.size()) < n) {
      auto rollout = envsim::multistep::BaseRollout(family, nominal, family.horizon(), rng);
      pairs.insert(pairs.end(), rollout.begin(), rollout.end());
    }
    pairs.resize(n);
    out.transitions = envsim::Relabel(family, pairs, params, env_id);
    return out;
  }
  out.transitions.reserve(n);
  for (int i = 0; i < n; ++i) {
    envsim::Vec s = family.SampleState(rng);
    envsim::Vec a = family.SampleAction(rng);
    envsim::Vec next = family.Step(params, s, a);
    out.transitions.push_back({std::move(s), std::move(a), std::move(next), env_id});
  }
  return out;
}

std::vector<const EnvDataset*> DatasetCollection::Select(Split split) const {
  std::vector<const EnvDataset*> out;
  for (const auto& env : envs) {
    if (env.split == split) out.push_back(&env);
  }
  return out;
}

const EnvDataset& DatasetCollection::Env(int env_id) const {
  for (const auto& env : envs) {
    if (env.env_id == env_id) return env;
  }
  throw std::out_of_range("no environment with id " + std::to_string(env_id));
}

DatasetCollection GenerateCollection(const Family& family, const SplitCounts& counts,
                                     int actions_per_env, std::uint64_t seed) {
  DatasetCollection out;
  out.family = std::string(family.name());
  out.seed = seed;
  out.ribbons = RibbonSplit::Make(family, seed);
  const auto envs = SampleEnvironments(family, out.ribbons, counts, seed);
  for (std::size_t i = 0; i < envs.size(); ++i) {
    const int id = static_cast<int>(i);
    out.envs.push_back(GenerateDataset(family, envs[i].params, id, envs[i].split, actions_per_env,
                                       DeriveSeed(DeriveSeed(seed, "dataset"), i)));
  }
  return out;
}

DatasetCollection Rerecord(const DatasetCollection& collection, int actions_per_env,
                           std::optional<Split> only) {
  const Family& family = collection.family_ref();
  DatasetCollection out;
  out.family = collection.family;
  out.seed = collection.seed;
  out.ribbons = collection.ribbons;
  for (const EnvDataset& env : collection.envs) {
    if (only && env.split != *only) {
      out.envs.push_back(env);
      continue;
    }
    out.envs.push_back(GenerateDataset(family, env.params, env.env_id, env.split, actions_per_env,
                                       DeriveSeed(DeriveSeed(collection.seed, "dataset"),
                                                  static_cast<std::uint64_t>(env.env_id))));
  }
  return out;
}

ContextSet SampleContext(const EnvDataset& dataset, int n, std::optional<std::size_t> exclude,
                         Rng& rng) {
  ContextSet out;
  if (n <= 0) return out;
  std::vector<std::size_t> pool;
  pool.reserve(dataset.transitions.size());
  for (std::size_t i = 0; i < dataset.transitions.size(); ++i) {
    if (!exclude || *exclude != i) pool.push_back(i);
  }
  if (pool.empty()) return out;
  out.points.reserve(n);
  if (pool.size() >= static_cast<std::size_t>(n)) {
    for (int k = 0; k < n; ++k) {
      const std::size_t j = k + UniformIndex(rng, pool.size() - k);
      std::swap(pool[k], pool[j]);
      out.points.push_back(dataset.transitions[pool[k]]);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      out.points.push_back(dataset.transitions[pool[UniformIndex(rng, pool.size())]]);
    }
  }
  return out;
}

ContextSet SampleContext(const EnvDataset& dataset, int n, std::optional<std::size_t> exclude,
                         std::uint64_t seed) {
  Rng rng(seed);
  return SampleContext(dataset, n, exclude, rng);
}

std::string Serialize(const DatasetCollection& collection) {
  const Family& family = collection.family_ref();
  std::ostringstream out;
  Json header;
  header["record"] = "header";
  header["format"] = "iida-dataset";
  header["version"] = 1;
  header["family"] = collection.family;
  header["state_width"] = family.state_width();
  header["action_width"] = family.action_width();
  header["seed"] = collection.seed;
  Json names = Json::array();
  Json ribbons = Json::object();
  for (std::size_t f = 0; f < family.num_factors(); ++f) {
    const std::string& name = family.factors()[f].name;
    names.push_back(name);
    Json labels = Json::array();
    if (f < collection.ribbons.assignment.size()) {
      for (Split s : collection.ribbons.assignment[f]) labels.push_back(SplitName(s));
    }
    ribbons[name] = labels;
  }
  header["factors"] = names;
  header["ribbons"] = ribbons;
  out << header.dump() << "\n";

  for (const auto& env : collection.envs) {
    Json record;
    record["record"] = "env";
    record["env_id"] = env.env_id;
    record["split"] = SplitName(env.split);
    record["family"] = collection.family;
    Json params = Json::object();
    for (std::size_t f = 0; f < family.num_factors(); ++f) {
      params[family.factors()[f].name] = env.params.values.at(f);
    }
    record["params"] = params;
    Json rows = Json::array();
    for (const auto& t : env.transitions) {
      std::vector<double> flat;
      flat.insert(flat.end(), t.s.begin(), t.s.end());
      flat.insert(flat.end(), t.a.begin(), t.a.end());
      flat.insert(flat.end(), t.s_next.begin(), t.s_next.end());
      rows.push_back(flat);
    }
    record["transitions"] = rows;
    out << record.dump() << "\n";
  }
  return out.str();
}

void Save(const DatasetCollection& collection, const std::filesystem::path& path) {
  const std::string text = Serialize(collection);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

DatasetCollection Parse(std::string_view text) {
  DatasetCollection out;
  std::istringstream in{std::string(text)};
  std::string line;
  int record_index = -1;
  const Family* family = nullptr;
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("dataset record " + std::to_string(record_index) + ": " + what);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++record_index;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw fail(std::string("malformed JSON (") + e.what() + ")");
    }
    try {
      const std::string kind = record.at("record").get<std::string>();
      if (record_index == 0) {
        if (kind != "header" || record.at("format") != "iida-dataset" ||
            record.at("version") != 1) {
          throw fail("expected an iida-dataset v1 header");
        }
        out.family = record.at("family").get<std::string>();
        family = &envsim::FamilyByName(out.family);
        if (record.at("state_width") != family->state_width() ||
            record.at("action_width") != family->action_width()) {
          throw fail("declared widths do not match family " + out.family);
        }
        out.seed = record.at("seed").get<std::uint64_t>();
        for (const auto& factor : family->factors()) {
          const auto labels = record.at("ribbons").at(factor.name).get<std::vector<std::string>>();
          if (labels.size() != RibbonSplit::kRibbons) {
            throw fail("factor " + factor.name + " needs 30 ribbon labels");
          }
          std::array<Split, RibbonSplit::kRibbons> row;
          for (int r = 0; r < RibbonSplit::kRibbons; ++r) row[r] = ParseSplit(labels[r]);
          out.ribbons.assignment.push_back(row);
        }
        continue;
      }
      if (kind != "env") throw fail("unexpected record type '" + kind + "'");
      EnvDataset env;
      env.env_id = record.at("env_id").get<int>();
      env.split = ParseSplit(record.at("split").get<std::string>());
      if (record.at("family") != out.family) throw fail("family mismatch");
      for (const auto& factor : family->factors()) {
        env.params.values.push_back(record.at("params").at(factor.name).get<double>());
      }
      const std::size_t sw = family->state_width(), aw = family->action_width();
      const std::size_t width = 2 * sw + aw;
      for (const auto& row : record.at("transitions")) {
        const auto flat = row.get<std::vector<double>>();
        if (flat.size() != width) {
          throw fail("env " + std::to_string(env.env_id) + ": transition has " +
                     std::to_string(flat.size()) + " values, expected " + std::to_string(width));
        }
        Transition t;
        t.s.assign(flat.begin(), flat.begin() + sw);
        t.a.assign(flat.begin() + sw, flat.begin() + sw + aw);
        t.s_next.assign(flat.begin() + sw + aw, flat.end());
        t.env_id = env.env_id;
        env.transitions.push_back(std::move(t));
      }
      for (const auto& other : out.envs) {
        if (other.env_id == env.env_id)
          throw fail("duplicate env_id " + std::to_string(env.env_id));
      }
      out.envs.push_back(std::move(env));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
  }
  if (record_index < 0) throw FormatError("dataset: empty file");
  return out;
}

DatasetCollection Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read dataset " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

}  // namespace iida::data
