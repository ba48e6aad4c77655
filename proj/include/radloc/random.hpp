// Copyright 2026 The radloc Authors
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

#ifndef RADLOC__RANDOM_HPP_
#define RADLOC__RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace radloc
{

/// Seeded pseudo-random source. Every stochastic operation takes one of these
/// explicitly; nothing in the library reads wall-clock entropy.
///
/// Independent sub-streams are obtained with derive(), which hashes a base seed
/// together with integer keys (e.g. time index, particle index). This keeps
/// parallel regions reproducible: the stream a worker uses depends only on the
/// keys, never on scheduling order.
class RandomStream
{
public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  /// Draws a 64-bit value suitable as a seed for derive().
  std::uint64_t next_seed();

  double uniform(double lo, double hi);
  double uniform01();
  double normal(double stddev);
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  std::mt19937_64 & engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to mix seeds and keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace radloc

#endif  // RADLOC__RANDOM_HPP_
