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

#ifndef IIDA_NUMCORE_PARAMETERS_H_
#define IIDA_NUMCORE_PARAMETERS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "iida/common/random.h"
#include "iida/numcore/tensor.h"
#include "json.hpp"

namespace iida::numcore {

// Named, insertion-ordered collection of trainable leaves.
class ParameterStore {
 public:
  Tensor Add(const std::string& name, Shape shape, std::vector<double> values);
  // Weight matrix [fan_in, fan_out], uniform in +-sqrt(6 / (fan_in + fan_out)).
  Tensor AddGlorot(const std::string& name, int fan_in, int fan_out, Rng& rng);
  Tensor AddZeros(const std::string& name, Shape shape);

  const Tensor& Get(const std::string& name) const;
  bool Contains(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::vector<Tensor> tensors() const;
  std::size_t TotalSize() const;

  void ZeroGrad();

  // Deep copy of all values, for best-checkpoint retention.
  std::map<std::string, std::vector<double>> Snapshot() const;
  void Restore(const std::map<std::string, std::vector<double>>& snapshot);

  // {"format": "iida-params", "version": 1,
  //  "params": [{"name", "shape", "values"}...]}
  // Values are written in shortest round-trip form, so load(save(x)) is
  // bit-exact.
  nlohmann::json ToJson() const;
  // Loads values into already-registered parameters; names and shapes must
  // match exactly.
  void LoadJson(const nlohmann::json& doc);

  void Save(const std::filesystem::path& path) const;
  void Load(const std::filesystem::path& path);

 private:
  std::vector<std::string> names_;
  std::map<std::string, Tensor> by_name_;
};

std::vector<double> GlorotUniform(int fan_in, int fan_out, Rng& rng);

}  // namespace iida::numcore

#endif  // IIDA_NUMCORE_PARAMETERS_H_
