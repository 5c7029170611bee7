// Copyright 2026 The tunectl Authors.
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

#ifndef TUNECTL_COMMON_RNG_H_
#define TUNECTL_COMMON_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <type_traits>

namespace tunectl {

// Seeded random source with portable value mapping. The standard
// distributions are implementation-defined, so they are not used anywhere a
// result must be reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform01();
  double Uniform(double lo, double hi);
  // Uniform over the closed integer range [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  std::size_t Index(std::size_t n) {
    return static_cast<std::size_t>(UniformInt(0, static_cast<std::int64_t>(n) - 1));
  }
  // Standard normal via Box-Muller.
  double Normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// SplitMix64 finalizer.
std::uint64_t MixBits(std::uint64_t x);

// FNV-1a.
std::uint64_t HashString(std::string_view text);

inline std::uint64_t DeriveSeed(std::uint64_t base) { return MixBits(base); }

// Combines a base seed with any number of integer or string tags into an
// independent stream seed.
template <typename T, typename... Rest>
std::uint64_t DeriveSeed(std::uint64_t base, const T& tag, const Rest&... rest) {
  std::uint64_t tag_bits;
  if constexpr (std::is_convertible_v<const T&, std::string_view>) {
    tag_bits = HashString(std::string_view(tag));
  } else {
    tag_bits = static_cast<std::uint64_t>(tag);
  }
  return DeriveSeed(MixBits(base ^ MixBits(tag_bits + 0x9e3779b97f4a7c15ULL)), rest...);
}

}  // namespace tunectl

#endif  // TUNECTL_COMMON_RNG_H_
