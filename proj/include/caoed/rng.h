// Copyright 2026 The caoed Authors
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

#ifndef CAOED_RNG_H_
#define CAOED_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace caoed {

// SplitMix64 finalizer; used to decorrelate user seeds and derive substreams.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream. std::mt19937_64 output is fixed by the
// standard; the uniform and Gaussian transforms are implemented here so the
// stream is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(SplitMix64(seed)) {}

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }

  // uniform on [0, 1) with 53 random bits
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // standard normal via Box-Muller, caching the second variate
  double Gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double Gaussian(double mean, double stddev) {
    return mean + stddev * Gaussian();
  }

  // Independent child stream; does not advance this stream.
  Rng Split(uint64_t stream) const {
    return Rng(SplitMix64(seed_ ^ SplitMix64(stream + 0x632be59bd9b4e019ULL)));
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline Rng SeededRng(uint64_t seed) { return Rng(seed); }

}  // namespace caoed

#endif  // CAOED_RNG_H_
