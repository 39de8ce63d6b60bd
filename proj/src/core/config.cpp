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

#include "probft/config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace probft {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kPropose:
      return "propose";
    case MessageKind::kNewLeader:
      return "new_leader";
    case MessageKind::kPrepare:
      return "prepare";
    case MessageKind::kCommit:
      return "commit";
  }
  return "unknown";
}

std::uint64_t tolerant_ceil(double x) {
  if (!(x > 0)) return 0;
  return static_cast<std::uint64_t>(std::ceil(x - 1e-9));
}

QuorumSizes quorum_sizes(std::uint32_t n, std::uint32_t f, double l, double o) {
  if (n == 0) throw ConfigError("n must be positive");
  if (3ull * f >= n) {
    throw ConfigError("fault budget violates f < n/3 (n=" + std::to_string(n) +
                      ", f=" + std::to_string(f) + ")");
  }
  if (!(l >= 1.0)) throw ConfigError("quorum scale factor l must be >= 1");
  if (!(o > 1.0)) throw ConfigError("overprovisioning factor o must be > 1");

  QuorumSizes sizes;
  const std::uint64_t q = std::max<std::uint64_t>(1, tolerant_ceil(l * std::sqrt(double(n))));
  if (q > n) {
    throw ConfigError("probabilistic quorum q=" + std::to_string(q) + " exceeds n=" +
                      std::to_string(n));
  }
  sizes.q = static_cast<std::uint32_t>(q);
  sizes.s = static_cast<std::uint32_t>(std::min<std::uint64_t>(n, tolerant_ceil(o * double(q))));
  sizes.det_quorum = (n + f + 2) / 2;
  return sizes;
}

ReplicaId leader(View v, std::uint32_t n) {
  return ReplicaId{static_cast<std::uint32_t>((v.value - 1) % n) + 1};
}

ProtocolConfig ProtocolConfig::make(std::uint32_t n, std::uint32_t f, double l, double o,
                                    std::uint64_t rng_seed) {
  ProtocolConfig c;
  c.sizes_ = quorum_sizes(n, f, l, o);
  c.n_ = n;
  c.f_ = f;
  c.l_ = l;
  c.o_ = o;
  c.rng_seed_ = rng_seed;
  return c;
}

}  // namespace probft
