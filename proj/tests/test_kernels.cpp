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

#include <random>
#include <vector>

#include "doctest.h"
#include "probft/kernels.hpp"

using namespace probft;

TEST_CASE("scalar kernels") {
  const auto& k = kernels::scalar();
  std::vector<std::uint16_t> c{0, 5, 19, 20, 21, 65535};
  std::vector<std::uint8_t> flags(c.size(), 9);
  CHECK(k.count_at_least(c.data(), c.size(), 20) == 3);
  CHECK(k.mark_at_least(c.data(), c.size(), 20, flags.data()) == 3);
  CHECK(flags == std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1});
  std::vector<std::uint32_t> acc(c.size(), 1);
  k.accumulate(flags.data(), flags.size(), acc.data());
  CHECK(acc == std::vector<std::uint32_t>{1, 1, 1, 2, 2, 2});
  CHECK(k.count_at_least(c.data(), 0, 0) == 0);
}

TEST_CASE("avx2 kernels match scalar") {
  const auto* v = kernels::avx2();
  if (v == nullptr) {
    MESSAGE("no AVX2 on this machine; equivalence not exercised");
    return;
  }
  const auto& s = kernels::scalar();
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n <= 200; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<std::uint16_t> c(n);
      // Mix small counts near typical quorum sizes with the full range.
      for (auto& x : c) x = rep == 3 ? static_cast<std::uint16_t>(rng()) : static_cast<std::uint16_t>(rng() % 48);
      const std::uint16_t q = rep == 3 ? static_cast<std::uint16_t>(rng()) : static_cast<std::uint16_t>(rng() % 48);
      CHECK(v->count_at_least(c.data(), n, q) == s.count_at_least(c.data(), n, q));
      std::vector<std::uint8_t> fa(n + 1, 7), fb(n + 1, 7);
      CHECK(v->mark_at_least(c.data(), n, q, fa.data()) == s.mark_at_least(c.data(), n, q, fb.data()));
      CHECK(fa == fb);  // including the untouched sentinel past the end
      std::vector<std::uint32_t> aa(n + 1, 3), ab(n + 1, 3);
      v->accumulate(fa.data(), n, aa.data());
      s.accumulate(fb.data(), n, ab.data());
      CHECK(aa == ab);
    }
  }
  // Boundaries of the unsigned compare.
  std::vector<std::uint16_t> edge;
  for (int i = 0; i < 11; ++i) edge.insert(edge.end(), {0, 1, 32767, 32768, 65534, 65535});
  for (std::uint16_t q : {0, 1, 32767, 32768, 65535}) {
    CHECK(v->count_at_least(edge.data(), edge.size(), q) == s.count_at_least(edge.data(), edge.size(), q));
  }
}

TEST_CASE("active kernel is one of the two") {
  const auto& a = kernels::active();
  CHECK((a.name == "scalar" || a.name == "avx2"));
}
