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

#include "iida/common/random.h"

#include <stdexcept>

namespace iida {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t parent, std::string_view tag) {
  return SplitMix64(SplitMix64(parent) ^ Fnv1a(tag));
}

std::uint64_t DeriveSeed(std::uint64_t parent, std::uint64_t index) {
  return SplitMix64(SplitMix64(parent) + SplitMix64(index ^ 0x5851f42d4c957f2dULL));
}

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double UniformOpen(Rng& rng, double lo, double hi) {
  for (;;) {
    double v = Uniform(rng, lo, hi);
    if (v > lo && v < hi) return v;
  }
}

double Normal(Rng& rng, double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(rng);
}

std::size_t UniformIndex(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("UniformIndex: empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace iida
