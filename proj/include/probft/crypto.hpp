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

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <span>
#include <vector>

#include "probft/types.hpp"

// Simulated signatures and VRF. Keys are derived deterministically from the
// run seed; verification goes through a per-run registry that can recompute
// keyed PRF outputs. The adversary never receives correct replicas' private
// keys, so within the model signatures and samples are unforgeable.
namespace probft::crypto {

inline constexpr std::size_t kKeyBytes = 32;
inline constexpr std::size_t kDigestBytes = 32;

using PrivateKey = std::array<std::uint8_t, kKeyBytes>;
using PublicKey = std::array<std::uint8_t, kKeyBytes>;

struct Signature {
  std::array<std::uint8_t, kDigestBytes> bytes{};
  bool operator==(const Signature&) const = default;
};

struct VrfProof {
  std::array<std::uint8_t, kDigestBytes> output{};
  ReplicaId owner;
  Bytes seed;
  std::uint32_t s = 0;

  bool operator==(const VrfProof&) const = default;
};

struct KeyPair {
  PrivateKey private_key{};
  PublicKey public_key{};
  ReplicaId owner;
};

enum class Phase : std::uint8_t { kPrepare = 0x01, kCommit = 0x02 };

/// Seed for a phase sample: 8-byte big-endian view followed by the phase tag.
Bytes vrf_seed(View view, Phase phase);

KeyPair generate_key_pair(std::uint64_t rng_seed, ReplicaId owner);

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> payload);

struct VrfResult {
  std::vector<ReplicaId> sample;  // sorted ascending, exactly s distinct ids
  VrfProof proof;
};

/// Selects s distinct replicas of [1, n], deterministic in (key, seed, s).
/// Throws std::invalid_argument when s == 0 or s > n.
VrfResult vrf_prove(const KeyPair& key, std::span<const std::uint8_t> seed, std::uint32_t s,
                    std::uint32_t n);

/// Expands a VRF output into its sample. Exposed for the golden fixtures.
std::vector<ReplicaId> sample_from_output(std::span<const std::uint8_t> output, std::uint32_t s,
                                          std::uint32_t n);

/// Capability to act as one replica: sign and prove with its private key.
class Signer {
 public:
  explicit Signer(KeyPair key) : key_(key) {}

  ReplicaId id() const { return key_.owner; }
  const PublicKey& public_key() const { return key_.public_key; }

  Signature sign(std::span<const std::uint8_t> payload) const {
    return crypto::sign(key_.private_key, payload);
  }
  VrfResult vrf_prove(std::span<const std::uint8_t> seed, std::uint32_t s, std::uint32_t n) const {
    return crypto::vrf_prove(key_, seed, s, n);
  }

 private:
  KeyPair key_;
};

/// Verification side of the protocol's cryptography.
class Verifier {
 public:
  virtual ~Verifier() = default;

  virtual std::uint32_t n() const = 0;
  virtual bool verify(ReplicaId signer, std::span<const std::uint8_t> payload,
                      const Signature& sig) const = 0;
  virtual bool vrf_verify(ReplicaId owner, std::span<const std::uint8_t> seed, std::uint32_t s,
                          std::span<const ReplicaId> sample, const VrfProof& proof) const = 0;
};

/// Per-run PKI: holds every replica's key pair and answers verification
/// queries by recomputing the keyed PRF. Expanded samples are memoized per
/// (owner, seed, s); certificates get re-checked many times in a view change.
class KeyRegistry final : public Verifier {
 public:
  KeyRegistry(std::uint64_t rng_seed, std::uint32_t n);

  std::uint32_t n() const override { return static_cast<std::uint32_t>(keys_.size()); }
  const PublicKey& public_key(ReplicaId id) const;
  Signer signer(ReplicaId id) const;

  bool verify(ReplicaId signer, std::span<const std::uint8_t> payload,
              const Signature& sig) const override;
  bool vrf_verify(ReplicaId owner, std::span<const std::uint8_t> seed, std::uint32_t s,
                  std::span<const ReplicaId> sample, const VrfProof& proof) const override;

  bool verify(const PublicKey& key, std::span<const std::uint8_t> payload,
              const Signature& sig) const;
  bool vrf_verify(const PublicKey& key, std::span<const std::uint8_t> seed, std::uint32_t s,
                  std::span<const ReplicaId> sample, const VrfProof& proof) const;

 private:
  struct Expanded {
    std::array<std::uint8_t, kDigestBytes> output{};
    std::vector<ReplicaId> sample;
  };

  const KeyPair* find(const PublicKey& key) const;
  const Expanded& expand(ReplicaId owner, std::span<const std::uint8_t> seed, std::uint32_t s) const;

  std::vector<KeyPair> keys_;
  std::map<PublicKey, std::size_t> by_public_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<std::uint32_t, std::uint32_t, Bytes>, Expanded> expanded_;
};

}  // namespace probft::crypto
