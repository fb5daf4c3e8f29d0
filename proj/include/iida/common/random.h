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

#ifndef IIDA_COMMON_RANDOM_H_
#define IIDA_COMMON_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace iida {

using Rng = std::mt19937_64;

// Stable sub-seed derivation: splitmix64 over the parent seed mixed with an
// FNV-1a hash of the tag. Used so every consumer of randomness gets its own
// stream, e.g. DeriveSeed(seed, "train/batches").
std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view tag);
std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index);

// Uniform draw on [lo, hi).
double Uniform(Rng& rng, double lo, double hi);
// Uniform draw strictly inside (lo, hi).
double UniformOpen(Rng& rng, double lo, double hi);
double Normal(Rng& rng, double mean, double stddev);
// Uniform integer in [0, n).
std::size_t UniformIndex(Rng& rng, std::size_t n);

}  // namespace iida

#endif  // IIDA_COMMON_RANDOM_H_
