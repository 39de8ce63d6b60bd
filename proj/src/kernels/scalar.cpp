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

#include "probft/kernels.hpp"

namespace probft::kernels {
namespace {

std::size_t count_at_least(const std::uint16_t* counts, std::size_t n, std::uint16_t q) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += counts[i] >= q;
  return c;
}

std::size_t mark_at_least(const std::uint16_t* counts, std::size_t n, std::uint16_t q,
                          std::uint8_t* flags) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    flags[i] = counts[i] >= q;
    c += flags[i];
  }
  return c;
}

void accumulate(const std::uint8_t* flags, std::size_t n, std::uint32_t* acc) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += flags[i];
}

}  // namespace

const Table& scalar() {
  static const Table t{"scalar", count_at_least, mark_at_least, accumulate};
  return t;
}

}  // namespace probft::kernels
