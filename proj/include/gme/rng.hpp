// Copyright 2026 The GME Activation Authors
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

#ifndef GME_RNG_HPP
#define GME_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace gme {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seeded 64-bit generator. Uniform draws use the top 53 bits directly so
/// results do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for one Monte Carlo shot, derived from the run seed
  /// and the shot counter only.
  static Rng for_shot(std::uint64_t seed, std::uint64_t shot) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(shot + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index drawn with the given (nonnegative, unit-sum) weights.
  std::size_t sample(std::span<const double> probabilities) {
    const double u = uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      if (probabilities[i] <= 0.0) continue;
      cumulative += probabilities[i];
      last_positive = i;
      if (u < cumulative) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gme

#endif  // GME_RNG_HPP
