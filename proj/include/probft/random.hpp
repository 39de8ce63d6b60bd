// Copyright 2026 The probft Authors.
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace probft {

/// Unbiased integer in [0, bound) from a 64-bit engine (Lemire's
/// multiply-and-reject). Unlike std::uniform_int_distribution the result is
/// identical across standard library implementations.
template <class Engine>
std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  static_assert(Engine::max() == ~std::uint64_t{0} && Engine::min() == 0);
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform integer in [lo, hi].
template <class Engine>
std::uint64_t uniform_between(Engine& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform_below(rng, hi - lo + 1);
}

/// Uniform real in [0, 1) with 53 random bits.
template <class Engine>
double uniform_unit(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Reusable membership marks for Floyd sampling over [0, n).
class SampleScratch {
 public:
  explicit SampleScratch(std::uint32_t n = 0) : stamp_(n, 0) {}

  void resize(std::uint32_t n) {
    if (stamp_.size() != n) {
      stamp_.assign(n, 0);
      epoch_ = 0;
    }
  }

  /// Draws s distinct indices from [0, n) uniformly (Floyd's algorithm) into
  /// `out` (unsorted). Every s-subset is equally likely.
  template <class Engine>
  void draw(Engine& rng, std::uint32_t n, std::uint32_t s, std::vector<std::uint32_t>& out) {
    resize(n);
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    out.clear();
    for (std::uint32_t j = n - s; j < n; ++j) {
      auto t = static_cast<std::uint32_t>(uniform_below(rng, std::uint64_t{j} + 1));
      if (stamp_[t] == epoch_) t = j;
      stamp_[t] = epoch_;
      out.push_back(t);
    }
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

/// Independent per-trial engine derived from (base_seed, stream index).
inline std::mt19937_64 stream_engine(std::uint64_t base_seed, std::uint64_t index,
                                     std::uint32_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), salt};
  return std::mt19937_64(seq);
}

}  // namespace probft
