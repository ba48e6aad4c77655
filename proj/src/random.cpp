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

#include "radloc/random.hpp"

namespace radloc
{

std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

RandomStream RandomStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
  std::uint64_t h = mix64(seed);
  for (const auto k : keys) {
    h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  }
  return RandomStream(h);
}

std::uint64_t RandomStream::next_seed() { return engine_(); }

double RandomStream::uniform(double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double RandomStream::uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double RandomStream::normal(double stddev)
{
  if (stddev == 0.0) {
    return 0.0;
  }
  return stddev * normal_(engine_);
}

std::uint64_t RandomStream::index(std::uint64_t n)
{
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

}  // namespace radloc
