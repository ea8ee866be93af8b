//
// Copyright 2026 The ActAudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef ACTAUDIT_CORE_RNG_HPP
#define ACTAUDIT_CORE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace actaudit::rng {

// All randomness in the toolkit flows from a single root seed through named
// substreams. Draw procedures are spelled out here (no distribution classes
// from <random>, whose outputs are implementation-defined) so runs are
// reproducible bit-for-bit on any conforming standard library.

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t hash_string(std::string_view s) {
  // FNV-1a, then one splitmix round to spread low-entropy inputs.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t state = a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2));
  uint64_t out = splitmix64(state);
  state ^= b;
  return out ^ splitmix64(state);
}

// Substream seed for a named component, e.g. derive(root, "train").
inline uint64_t derive(uint64_t root, std::string_view name) {
  return mix(root, hash_string(name));
}

inline uint64_t derive(uint64_t root, std::string_view name, uint64_t counter) {
  return mix(derive(root, name), counter);
}

inline uint64_t derive(uint64_t root, std::string_view name,
                       std::string_view unit, uint64_t counter) {
  return mix(derive(root, name), mix(hash_string(unit), counter));
}

class Stream {
 public:
  explicit Stream(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection-sampled so it is exactly uniform.
  uint64_t uniform_int(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller (no cached spare: one draw costs two
  // uniforms, which keeps the stream position independent of call history).
  double normal() {
    const double u1 =
        (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Fisher-Yates; std::shuffle is implementation-defined.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace actaudit::rng

#endif  // ACTAUDIT_CORE_RNG_HPP
