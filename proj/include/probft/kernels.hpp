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

#include <cstddef>
#include <cstdint>
#include <string_view>

// Hot loops of the Monte-Carlo estimators over per-replica message counts.
// Each kernel has a portable scalar version and, on x86-64, an AVX2 version
// chosen at runtime. Both must produce identical results.
namespace probft::kernels {

struct Table {
  std::string_view name;
  /// Number of i < n with counts[i] >= q.
  std::size_t (*count_at_least)(const std::uint16_t* counts, std::size_t n, std::uint16_t q);
  /// flags[i] = counts[i] >= q ? 1 : 0; returns the number of ones.
  std::size_t (*mark_at_least)(const std::uint16_t* counts, std::size_t n, std::uint16_t q,
                               std::uint8_t* flags);
  /// acc[i] += flags[i].
  void (*accumulate)(const std::uint8_t* flags, std::size_t n, std::uint32_t* acc);
};

const Table& scalar();
/// nullptr when the CPU (or the build target) lacks AVX2.
const Table* avx2();
/// Best table for this CPU; PROBFT_KERNELS=scalar forces the portable path.
const Table& active();

}  // namespace probft::kernels
