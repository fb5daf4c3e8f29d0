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

#include "iida/numcore/parameters.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace iida::numcore {

std::vector<double> GlorotUniform(int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
  for (double& v : w) v = Uniform(rng, -limit, limit);
  return w;
}

Tensor ParameterStore::Add(const std::string& name, Shape shape, std::vector<double> values) {
  if (by_name_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
  Tensor t = Tensor::Parameter(std::move(shape), std::move(values));
  names_.push_back(name);
  by_name_.emplace(name, t);
  return t;
}

Tensor ParameterStore::AddGlorot(const std::string& name, int fan_in, int fan_out, Rng& rng) {
  return Add(name, {fan_in, fan_out}, GlorotUniform(fan_in, fan_out, rng));
}

Tensor ParameterStore::AddZeros(const std::string& name, Shape shape) {
  const std::size_t n = NumElements(shape);
  return Add(name, std::move(shape), std::vector<double>(n, 0.0));
}

const Tensor& ParameterStore::Get(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown parameter " + name);
  return it->second;
}

bool ParameterStore::Contains(const std::string& name) const { return by_name_.count(name) > 0; }

std::vector<Tensor> ParameterStore::tensors() const {
  std::vector<Tensor> out;
  out.reserve(names_.size());
  for (const auto& n : names_) out.push_back(by_name_.at(n));
  return out;
}

std::size_t ParameterStore::TotalSize() const {
  std::size_t n = 0;
  for (const auto& [name, t] : by_name_) n += t.size();
  return n;
}

void ParameterStore::ZeroGrad() {
  for (auto& [name, t] : by_name_) t.ZeroGrad();
}

std::map<std::string, std::vector<double>> ParameterStore::Snapshot() const {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [name, t] : by_name_) {
    out.emplace(name, std::vector<double>(t.values().begin(), t.values().end()));
  }
  return out;
}

void ParameterStore::Restore(const std::map<std::string, std::vector<double>>& snapshot) {
  for (auto& [name, t] : by_name_) {
    auto it = snapshot.find(name);
    if (it == snapshot.end() || it->second.size() != t.size()) {
      throw std::invalid_argument("snapshot does not match parameter " + name);
    }
    std::copy(it->second.begin(), it->second.end(), t.mutable_values().begin());
  }
}

nlohmann::json ParameterStore::ToJson() const {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& name : names_) {
    const Tensor& t = by_name_.at(name);
    params.push_back({{"name", name},
                      {"shape", t.shape()},
                      {"values", std::vector<double>(t.values().begin(), t.values().end())}});
  }
  return {{"format", "iida-params"}, {"version", 1}, {"params", params}};
}

void ParameterStore::LoadJson(const nlohmann::json& doc) {
  if (doc.value("format", "") != "iida-params" || doc.value("version", 0) != 1) {
    throw std::runtime_error("checkpoint: not an iida-params v1 document");
  }
  const auto& params = doc.at("params");
  if (params.size() != names_.size()) {
    throw std::runtime_error("checkpoint: expected " + std::to_string(names_.size()) +
                             " parameters, found " + std::to_string(params.size()));
  }
  for (const auto& entry : params) {
    const std::string name = entry.at("name").get<std::string>();
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw std::runtime_error("checkpoint: unknown parameter " + name);
    Tensor& t = it->second;
    if (entry.at("shape").get<Shape>() != t.shape()) {
      throw std::runtime_error("checkpoint: shape mismatch for " + name);
    }
    const auto values = entry.at("values").get<std::vector<double>>();
    if (values.size() != t.size()) {
      throw std::runtime_error("checkpoint: value count mismatch for " + name);
    }
    std::copy(values.begin(), values.end(), t.mutable_values().begin());
  }
}

void ParameterStore::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ToJson().dump() << "\n";
}

void ParameterStore::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  LoadJson(nlohmann::json::parse(in));
}

}  // namespace iida::numcore
