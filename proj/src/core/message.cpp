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

#include "probft/message.hpp"

#include <cstring>

namespace probft {
namespace {

class Writer {
 public:
  explicit Writer(Bytes& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { be(v, 4); }
  void u64(std::uint64_t v) { be(v, 8); }
  void raw(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void blob(std::span<const std::uint8_t> b) {
    u32(static_cast<std::uint32_t>(b.size()));
    raw(b);
  }
  void str(const std::string& s) {
    blob({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
  }

 private:
  void be(std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(be(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(be(4)); }
  std::uint64_t u64() { return be(8); }
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    auto r = in_.subspan(pos_, n);
    pos_ += n;
    return r;
  }
  std::span<const std::uint8_t> blob() { return raw(u32()); }
  std::string str() {
    auto b = blob();
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
  }
  bool flag() {
    const auto f = u8();
    if (f > 1) throw DecodeError("invalid presence flag");
    return f == 1;
  }
  bool done() const { return pos_ == in_.size(); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DecodeError("truncated input");
  }
  std::uint64_t be(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = v << 8 | in_[pos_++];
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_pair(Writer& w, const SignedProposal& p) {
  w.u64(p.view.value);
  w.str(p.value.bytes);
  w.u32(p.signer.value);
  w.raw(p.signature.bytes);
}

SignedProposal read_pair(Reader& r) {
  SignedProposal p;
  p.view = View{r.u64()};
  p.value = Value{r.str()};
  p.signer = ReplicaId{r.u32()};
  auto sig = r.raw(crypto::kDigestBytes);
  std::memcpy(p.signature.bytes.data(), sig.data(), sig.size());
  return p;
}

void write_cert(Writer& w, const PreparedCertificate& c) {
  w.u64(c.view.value);
  w.str(c.value.bytes);
  w.u32(c.holder.value);
  w.u32(static_cast<std::uint32_t>(c.prepares.size()));
  for (const auto& m : c.prepares) w.blob(encode(*m));
}

PreparedCertificate read_cert(Reader& r) {
  PreparedCertificate c;
  c.view = View{r.u64()};
  c.value = Value{r.str()};
  c.holder = ReplicaId{r.u32()};
  const auto count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) c.prepares.push_back(decode_message(r.blob()));
  return c;
}

MessagePtr read_message(Reader& r) {
  Message m;
  const auto kind = r.u8();
  if (kind < 1 || kind > 4) throw DecodeError("unknown message kind");
  m.kind = static_cast<MessageKind>(kind);
  m.view = View{r.u64()};
  if (r.flag()) m.proposal = read_pair(r);
  const auto just = r.u32();
  for (std::uint32_t i = 0; i < just; ++i) m.justification.push_back(decode_message(r.blob()));
  m.prepared_view = View{r.u64()};
  if (r.flag()) m.prepared_val = Value{r.str()};
  if (r.flag()) {
    Reader inner(r.blob());
    m.cert = std::make_shared<const PreparedCertificate>(read_cert(inner));
    if (!inner.done()) throw DecodeError("trailing bytes in certificate");
  }
  const auto sample = r.u32();
  for (std::uint32_t i = 0; i < sample; ++i) m.sample.emplace_back(r.u32());
  if (r.flag()) {
    crypto::VrfProof p;
    auto out = r.raw(crypto::kDigestBytes);
    std::memcpy(p.output.data(), out.data(), out.size());
    p.owner = ReplicaId{r.u32()};
    auto seed = r.blob();
    p.seed.assign(seed.begin(), seed.end());
    p.s = r.u32();
    m.proof = std::move(p);
  }
  m.sender = ReplicaId{r.u32()};
  auto sig = r.raw(crypto::kDigestBytes);
  std::memcpy(m.signature.bytes.data(), sig.data(), sig.size());
  m.body = encode_body(m);
  return std::make_shared<const Message>(std::move(m));
}

MessagePtr finish(const crypto::Signer& signer, Message m) {
  m.sender = signer.id();
  m.body = encode_body(m);
  m.signature = signer.sign(m.body);
  return std::make_shared<const Message>(std::move(m));
}

}  // namespace

Bytes encode_body(const Message& m) {
  Bytes out;
  Writer w(out);
  w.u8(static_cast<std::uint8_t>(m.kind));
  w.u64(m.view.value);
  w.u8(m.proposal ? 1 : 0);
  if (m.proposal) write_pair(w, *m.proposal);
  w.u32(static_cast<std::uint32_t>(m.justification.size()));
  for (const auto& j : m.justification) w.blob(encode(*j));
  w.u64(m.prepared_view.value);
  w.u8(m.prepared_val ? 1 : 0);
  if (m.prepared_val) w.str(m.prepared_val->bytes);
  w.u8(m.cert ? 1 : 0);
  if (m.cert) w.blob(encode(*m.cert));
  w.u32(static_cast<std::uint32_t>(m.sample.size()));
  for (auto id : m.sample) w.u32(id.value);
  w.u8(m.proof ? 1 : 0);
  if (m.proof) {
    w.raw(m.proof->output);
    w.u32(m.proof->owner.value);
    w.blob(m.proof->seed);
    w.u32(m.proof->s);
  }
  w.u32(m.sender.value);
  return out;
}

Bytes encode(const Message& m) {
  Bytes out = m.body.empty() ? encode_body(m) : m.body;
  out.insert(out.end(), m.signature.bytes.begin(), m.signature.bytes.end());
  return out;
}

Bytes encode(const PreparedCertificate& c) {
  Bytes out;
  Writer w(out);
  write_cert(w, c);
  return out;
}

Bytes encode_proposal_pair(View view, const Value& value) {
  Bytes out;
  Writer w(out);
  w.raw(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("pair"), 4));
  w.u64(view.value);
  w.str(value.bytes);
  return out;
}

MessagePtr decode_message(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto m = read_message(r);
  if (!r.done()) throw DecodeError("trailing bytes after message");
  return m;
}

PreparedCertificate decode_certificate(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto c = read_cert(r);
  if (!r.done()) throw DecodeError("trailing bytes after certificate");
  return c;
}

SignedProposal sign_proposal(const crypto::Signer& leader, View view, const Value& value) {
  SignedProposal p{view, value, leader.id(), {}};
  p.signature = leader.sign(encode_proposal_pair(view, value));
  return p;
}

MessagePtr make_propose(const crypto::Signer& leader, SignedProposal pair,
                        std::vector<MessagePtr> justification) {
  Message m;
  m.kind = MessageKind::kPropose;
  m.view = pair.view;
  m.proposal = std::move(pair);
  m.justification = std::move(justification);
  return finish(leader, std::move(m));
}

MessagePtr make_new_leader(const crypto::Signer& sender, View view, View prepared_view,
                           std::optional<Value> prepared_val, CertificatePtr cert) {
  Message m;
  m.kind = MessageKind::kNewLeader;
  m.view = view;
  m.prepared_view = prepared_view;
  m.prepared_val = std::move(prepared_val);
  m.cert = std::move(cert);
  return finish(sender, std::move(m));
}

MessagePtr make_vote(const crypto::Signer& sender, MessageKind kind, SignedProposal pair,
                     std::vector<ReplicaId> sample, crypto::VrfProof proof) {
  Message m;
  m.kind = kind;
  m.view = pair.view;
  m.proposal = std::move(pair);
  m.sample = std::move(sample);
  m.proof = std::move(proof);
  return finish(sender, std::move(m));
}

bool verify_signature(const Message& m, const crypto::Verifier& verifier) {
  return verifier.verify(m.sender, encode_body(m), m.signature);
}

bool verify_proposal_pair(const SignedProposal& pair, const crypto::Verifier& verifier) {
  return verifier.verify(pair.signer, encode_proposal_pair(pair.view, pair.value), pair.signature);
}

}  // namespace probft
