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
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace probft::mc::detail {

inline constexpr std::uint64_t kChunk = 2048;

// Splits [0, trials) into fixed chunks, runs them on up to `threads`
// workers and merges the per-chunk accumulators in chunk order, so the
// result does not depend on the thread count. make_worker() is called once
// per thread; the worker is invoked as worker(trial_index, acc).
template <class Acc, class MakeWorker>
Acc run_trials(std::uint64_t trials, std::uint32_t threads, MakeWorker make_worker) {
  const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Acc> parts(chunks);
  std::atomic<std::uint64_t> next{0};

  auto body = [&] {
    auto worker = make_worker();
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) break;
      const std::uint64_t end = std::min(trials, (c + 1) * kChunk);
      for (std::uint64_t i = c * kChunk; i < end; ++i) worker(i, parts[c]);
    }
  };

  const auto t = static_cast<std::uint32_t>(std::min<std::uint64_t>(std::max(threads, 1u), chunks));
  if (t <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (std::uint32_t k = 0; k < t; ++k) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }

  Acc total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace probft::mc::detail
