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

#include <cstdint>

#include "probft/types.hpp"

namespace probft {

struct QuorumSizes {
  std::uint32_t q = 0;           // probabilistic quorum
  std::uint32_t s = 0;           // VRF sample size
  std::uint32_t det_quorum = 0;  // ceil((n + f + 1) / 2)

  bool operator==(const QuorumSizes&) const = default;
};

/// ceil(x) that treats values within 1e-9 above an integer as that integer,
/// so that products like 1.7 * 20 do not round up to 35.
std::uint64_t tolerant_ceil(double x);

/// Computes (q, s, det_quorum). Throws ConfigError when f >= n/3, l < 1,
/// o <= 1 or the quorum does not fit in n replicas. s is clamped to n.
QuorumSizes quorum_sizes(std::uint32_t n, std::uint32_t f, double l, double o);

/// Round-robin leader: ((v - 1) mod n) + 1.
ReplicaId leader(View v, std::uint32_t n);

/// Protocol parameters; the single source of quorum arithmetic.
class ProtocolConfig {
 public:
  static ProtocolConfig make(std::uint32_t n, std::uint32_t f, double l, double o,
                             std::uint64_t rng_seed = 0);

  std::uint32_t n() const { return n_; }
  std::uint32_t f() const { return f_; }
  double l() const { return l_; }
  double o() const { return o_; }
  std::uint32_t q() const { return sizes_.q; }
  std::uint32_t s() const { return sizes_.s; }
  std::uint32_t det_quorum() const { return sizes_.det_quorum; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  ReplicaId leader_of(View v) const { return leader(v, n_); }
  bool contains(ReplicaId id) const { return id.value >= 1 && id.value <= n_; }

  ProtocolConfig with_seed(std::uint64_t seed) const {
    ProtocolConfig c = *this;
    c.rng_seed_ = seed;
    return c;
  }

 private:
  ProtocolConfig() = default;

  std::uint32_t n_ = 0;
  std::uint32_t f_ = 0;
  double l_ = 0;
  double o_ = 0;
  QuorumSizes sizes_;
  std::uint64_t rng_seed_ = 0;
};

}  // namespace probft
