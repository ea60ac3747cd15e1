// Copyright 2026 The Recourse Forge Authors
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

#ifndef RECOURSE_RNG_HPP
#define RECOURSE_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace recourse {

// Seeded RNG wrapper. All draws are implemented on top of the raw 64-bit
// stream so that output is identical across standard library versions;
// std::uniform_* distributions are implementation-defined and would break
// the byte-identical artifact contract.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(splitmix(seed)) {}

  /// Independent stream derived from (seed, stream_id).
  static Rng derive(uint64_t seed, uint64_t stream_id) {
    return Rng(splitmix(seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1))));
  }

  uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Unbiased integer in [0, n) by rejection.
  uint64_t index(uint64_t n) {
    if (n == 0) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace recourse

#endif  // RECOURSE_RNG_HPP
