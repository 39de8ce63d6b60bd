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

#include "probft/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <stdexcept>

#include "probft/random.hpp"

namespace probft::crypto {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

void put_be(Bytes& out, std::uint64_t v, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::array<std::uint8_t, kDigestBytes> keyed_hash(std::span<const std::uint8_t> key,
                                                  std::span<const std::uint8_t> domain,
                                                  std::span<const std::uint8_t> payload) {
  ensure_sodium();
  crypto_generichash_state st;
  crypto_generichash_init(&st, key.data(), key.size(), kDigestBytes);
  crypto_generichash_update(&st, domain.data(), domain.size());
  crypto_generichash_update(&st, payload.data(), payload.size());
  std::array<std::uint8_t, kDigestBytes> out{};
  crypto_generichash_final(&st, out.data(), out.size());
  return out;
}

std::span<const std::uint8_t> tag(const char* s) {
  return {reinterpret_cast<const std::uint8_t*>(s), std::strlen(s)};
}

std::array<std::uint8_t, kDigestBytes> vrf_output(const PrivateKey& key,
                                                  std::span<const std::uint8_t> seed,
                                                  std::uint32_t s, std::uint32_t n) {
  Bytes input(seed.begin(), seed.end());
  put_be(input, s, 4);
  put_be(input, n, 4);
  return keyed_hash(key, tag("probft/vrf"), input);
}

}  // namespace

Bytes vrf_seed(View view, Phase phase) {
  Bytes seed;
  seed.reserve(9);
  put_be(seed, view.value, 8);
  seed.push_back(static_cast<std::uint8_t>(phase));
  return seed;
}

KeyPair generate_key_pair(std::uint64_t rng_seed, ReplicaId owner) {
  Bytes input;
  put_be(input, rng_seed, 8);
  put_be(input, owner.value, 4);
  KeyPair kp;
  kp.owner = owner;
  kp.private_key = keyed_hash({}, tag("probft/keygen"), input);
  kp.public_key = keyed_hash({}, tag("probft/public"), kp.private_key);
  return kp;
}

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> payload) {
  return Signature{keyed_hash(key, tag("probft/sign"), payload)};
}

std::vector<ReplicaId> sample_from_output(std::span<const std::uint8_t> output, std::uint32_t s,
                                          std::uint32_t n) {
  if (s == 0 || s > n) throw std::invalid_argument("sample size must be in [1, n]");
  std::vector<std::uint32_t> words;
  for (std::size_t i = 0; i + 4 <= output.size(); i += 4) {
    words.push_back(std::uint32_t{output[i]} << 24 | std::uint32_t{output[i + 1]} << 16 |
                    std::uint32_t{output[i + 2]} << 8 | std::uint32_t{output[i + 3]});
  }
  std::seed_seq seq(words.begin(), words.end());
  std::mt19937_64 rng(seq);
  SampleScratch scratch(n);
  std::vector<std::uint32_t> idx;
  scratch.draw(rng, n, s, idx);
  std::sort(idx.begin(), idx.end());
  std::vector<ReplicaId> sample;
  sample.reserve(s);
  for (auto i : idx) sample.emplace_back(i + 1);
  return sample;
}

VrfResult vrf_prove(const KeyPair& key, std::span<const std::uint8_t> seed, std::uint32_t s,
                    std::uint32_t n) {
  if (s == 0 || s > n) throw std::invalid_argument("sample size must be in [1, n]");
  VrfResult r;
  r.proof.output = vrf_output(key.private_key, seed, s, n);
  r.proof.owner = key.owner;
  r.proof.seed.assign(seed.begin(), seed.end());
  r.proof.s = s;
  r.sample = sample_from_output(r.proof.output, s, n);
  return r;
}

KeyRegistry::KeyRegistry(std::uint64_t rng_seed, std::uint32_t n) {
  keys_.reserve(n);
  for (std::uint32_t i = 1; i <= n; ++i) {
    keys_.push_back(generate_key_pair(rng_seed, ReplicaId{i}));
    by_public_.emplace(keys_.back().public_key, i - 1);
  }
}

const PublicKey& KeyRegistry::public_key(ReplicaId id) const {
  return keys_.at(id.value - 1).public_key;
}

Signer KeyRegistry::signer(ReplicaId id) const { return Signer(keys_.at(id.value - 1)); }

const KeyPair* KeyRegistry::find(const PublicKey& key) const {
  auto it = by_public_.find(key);
  return it == by_public_.end() ? nullptr : &keys_[it->second];
}

bool KeyRegistry::verify(ReplicaId signer, std::span<const std::uint8_t> payload,
                         const Signature& sig) const {
  if (signer.value < 1 || signer.value > keys_.size()) return false;
  return sign(keys_[signer.value - 1].private_key, payload) == sig;
}

bool KeyRegistry::verify(const PublicKey& key, std::span<const std::uint8_t> payload,
                         const Signature& sig) const {
  const KeyPair* kp = find(key);
  return kp != nullptr && sign(kp->private_key, payload) == sig;
}

bool KeyRegistry::vrf_verify(const PublicKey& key, std::span<const std::uint8_t> seed,
                             std::uint32_t s, std::span<const ReplicaId> sample,
                             const VrfProof& proof) const {
  const KeyPair* kp = find(key);
  return kp != nullptr && vrf_verify(kp->owner, seed, s, sample, proof);
}

bool KeyRegistry::vrf_verify(ReplicaId owner, std::span<const std::uint8_t> seed, std::uint32_t s,
                             std::span<const ReplicaId> sample, const VrfProof& proof) const {
  if (owner.value < 1 || owner.value > keys_.size()) return false;
  if (s == 0 || s > n() || sample.size() != s) return false;
  if (proof.owner != owner || proof.s != s) return false;
  if (!std::equal(seed.begin(), seed.end(), proof.seed.begin(), proof.seed.end())) return false;
  const auto& e = expand(owner, seed, s);
  if (e.output != proof.output) return false;
  return std::equal(e.sample.begin(), e.sample.end(), sample.begin(), sample.end());
}

const KeyRegistry::Expanded& KeyRegistry::expand(ReplicaId owner, std::span<const std::uint8_t> seed,
                                                 std::uint32_t s) const {
  std::lock_guard lock(mu_);
  auto [it, fresh] = expanded_.try_emplace({owner.value, s, Bytes(seed.begin(), seed.end())});
  if (fresh) {
    it->second.output = vrf_output(keys_[owner.value - 1].private_key, seed, s, n());
    it->second.sample = sample_from_output(it->second.output, s, n());
  }
  return it->second;
}

}  // namespace probft::crypto
